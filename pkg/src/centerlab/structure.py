"""Structural center mechanisms: Hamiltonian test, time-reversibility about a
rotated axis, Darboux-type first-integral verification, and candidate
characteristic directions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from .mpoly import MPoly, Rat, merge_tables, poly_gcd
from .ratfunc import RatFunc
from .realroots import (
    eval_poly,
    isolate_real_roots,
    rational_roots,
    refine_to_float,
    trim,
)
from .systems import PlaneSystem, lie_derivative


def is_hamiltonian(s: PlaneSystem) -> bool:
    """True iff the divergence P_x + Q_y vanishes identically."""
    return (s.P.diff("x") + s.Q.diff("y")).is_zero


def rotate_system(s: PlaneSystem, c, sn) -> PlaneSystem:
    """Rotate coordinates by the angle with cosine c and sine sn (exact
    rationals on the unit circle, e.g. (3/5, 4/5))."""
    if Rat(c) ** 2 + Rat(sn) ** 2 != 1:
        raise ValueError("(c, sn) must lie on the unit circle")
    table = s.vars
    x = MPoly.variable("x", table)
    y = MPoly.variable("y", table)
    X = x * c + y * sn
    Y = x * (-Rat(sn)) + y * c
    P = s.P.subs({"x": X, "y": Y}, table)
    Q = s.Q.subs({"x": X, "y": Y}, table)
    return PlaneSystem(P * c - Q * sn, P * sn + Q * c, s.params, s.assumptions)


# -- time-reversibility -------------------------------------------------------


@dataclass
class ReversibilityResult:
    """Axis conditions and verdict of the rotated-reflection symmetry test.

    ``conditions`` are polynomials in the rotation's cosine and sine (symbol
    names in ``axis_symbols``) plus any system parameters; together with
    c^2 + s^2 = 1 their real solutions are the admissible symmetry axes.
    """

    conditions: List[MPoly]
    axis_symbols: Tuple[str, str]
    verdict: str  # reversible | not_reversible | undetermined
    witnesses: List[Tuple[float, float]] = field(default_factory=list)
    exact_witnesses: List[Tuple[Rat, Rat]] = field(default_factory=list)
    all_angles: bool = False

    def witness_angles(self) -> List[float]:
        return [math.atan2(s, c) for c, s in self.witnesses]


def _fresh(name: str, taken) -> str:
    while name in taken:
        name = name + "_"
    return name


def reversibility_conditions(s: PlaneSystem) -> ReversibilityResult:
    """Impose invariance under reflection of the rotated frame combined with
    time reversal, coefficient-wise; solve on the unit circle when the system
    is parameter-free."""
    cname = _fresh("c", s.params)
    sname = _fresh("s", s.params)
    table = merge_tables(s.vars, (cname, sname))
    x = MPoly.variable("x", table)
    y = MPoly.variable("y", table)
    c = MPoly.variable(cname, table)
    sn = MPoly.variable(sname, table)
    P = s.P.embed(table)
    Q = s.Q.embed(table)
    X = x * c + y * sn
    Y = -(x * sn) + y * c
    Pr = P.subs({"x": X, "y": Y}, table)
    Qr = Q.subs({"x": X, "y": Y}, table)
    Pt = Pr * c - Qr * sn
    Qt = Pr * sn + Qr * c
    even = Pt + Pt.subs({"y": -y}, table)
    odd = Qt - Qt.subs({"y": -y}, table)

    cs_table = tuple(v for v in table if v not in ("x", "y"))
    circle = (MPoly.variable(cname, cs_table) ** 2
              + MPoly.variable(sname, cs_table) ** 2)
    conditions: List[MPoly] = []
    rows: List[MPoly] = []  # echelon basis for redundancy detection
    for g in (even, odd):
        # corner coefficients (pure powers of u or v) first: they give the
        # cleanest generators
        for t, coeff in sorted(_state_coefficients(g).items(),
                               key=lambda kv: (min(kv[0]), kv[0])):
            poly = coeff.embed(cs_table).primitive()
            if poly.is_zero:
                continue
            # powers of c^2 + s^2 equal 1 on the circle: strip them
            while True:
                q = poly.try_div(circle)
                if q is None:
                    break
                poly = q
            poly = poly.primitive()
            # dependence is tested modulo the circle relation s^2 -> 1 - c^2
            red = _linear_reduce(_circle_reduce_poly(poly, cname, sname), rows)
            if red.is_zero:
                continue
            rows.append(red.primitive())
            conditions.append(poly)

    params_present = any(
        set(p.variables_present()) - {cname, sname} for p in conditions
    )
    if params_present:
        return ReversibilityResult(conditions, (cname, sname), "undetermined")
    if not conditions:
        return ReversibilityResult([], (cname, sname), "reversible", all_angles=True,
                                   witnesses=[(1.0, 0.0)], exact_witnesses=[(Rat(1), Rat(0))])
    return _solve_on_circle(conditions, cname, sname)


def _state_coefficients(p: MPoly) -> dict:
    """Group terms by their (x, y) exponents; values keep the remaining
    variables."""
    ix = p.vars.index("x")
    iy = p.vars.index("y")
    out: dict = {}
    for e, cc in p.terms.items():
        key = (e[ix], e[iy])
        e2 = list(e)
        e2[ix] = 0
        e2[iy] = 0
        out.setdefault(key, {})[tuple(e2)] = cc
    return {k: MPoly(p.vars, d) for k, d in out.items()}


def _circle_reduce_poly(poly: MPoly, cname: str, sname: str) -> MPoly:
    """Canonical representative modulo c^2 + s^2 - 1: degree in s at most 1."""
    isn = poly.vars.index(sname)
    ic = poly.vars.index(cname)
    c2m1 = MPoly.const(poly.vars, 1) - MPoly.variable(cname, poly.vars) ** 2
    out = MPoly.zero(poly.vars)
    for e, coeff in poly.terms.items():
        k = e[isn]
        e2 = list(e)
        e2[isn] = k % 2
        base = MPoly.monomial(poly.vars, e2, coeff)
        if k >= 2:
            base = base * (c2m1 ** (k // 2))
        out = out + base
    return out


def _linear_reduce(poly: MPoly, rows: Sequence[MPoly]) -> MPoly:
    for r in rows:
        lm = r.leading_monomial()
        c = poly.terms.get(lm)
        if c:
            poly = poly - r * (c / r.terms[lm])
    return poly


def _solve_on_circle(conditions: List[MPoly], cname: str, sname: str) -> ReversibilityResult:
    table = conditions[0].vars
    ic = table.index(cname)
    isn = table.index(sname)

    exact: List[Tuple[Rat, Rat]] = []
    # axis cases first, checked exactly
    for cv, sv in ((Rat(1), Rat(0)), (Rat(0), Rat(1)), (Rat(-1), Rat(0)), (Rat(0), Rat(-1))):
        if all(g.subs({cname: cv, sname: sv}, ()).is_zero for g in conditions):
            exact.append((cv, sv))

    # reduce each condition to A(c) + B(c)*s modulo s^2 = 1 - c^2
    reduced = [_reduce_circle(g, cname, sname) for g in conditions]
    unielims: List[list] = []
    for (A, B) in reduced:
        if not trim(B):
            unielims.append(A)
        else:
            # s = -A/B on solutions; s^2 = 1 - c^2 gives A^2 - (1-c^2) B^2 = 0
            A2 = _poly_mul(A, A)
            B2 = _poly_mul(B, B)
            circ = _poly_sub(A2, _poly_mul([Rat(1), Rat(0), Rat(-1)], B2))
            unielims.append(circ)
    for i in range(len(reduced)):
        for j in range(i + 1, len(reduced)):
            Ai, Bi = reduced[i]
            Aj, Bj = reduced[j]
            cross = _poly_sub(_poly_mul(Ai, Bj), _poly_mul(Aj, Bi))
            if trim(cross):
                unielims.append(cross)

    from .realroots import poly_gcd_univ

    g = None
    for u in unielims:
        u = trim(u)
        if not u:
            continue
        g = u if g is None else poly_gcd_univ(g, u)
    witnesses: List[Tuple[float, float]] = [(float(c), float(s)) for c, s in exact]
    if g is not None and len(trim(g)) > 1:
        for lo, hi, ex in isolate_real_roots(g):
            if ex is not None:
                cv = ex
                if abs(cv) > 1:
                    continue
                s2 = 1 - cv * cv
                svs = []
                rs = _rat_sqrt(s2)
                if rs is not None:
                    svs = [rs, -rs] if rs else [Rat(0)]
                    for sv in svs:
                        if all(gq.subs({cname: cv, sname: sv}, ()).is_zero for gq in conditions):
                            if (cv, sv) not in exact:
                                exact.append((cv, sv))
                                witnesses.append((float(cv), float(sv)))
                    continue
                cf = float(cv)
            else:
                if hi < -1 or lo > 1:
                    continue
                cf = refine_to_float(g, lo, hi)
            if abs(cf) > 1:
                continue
            sf = math.sqrt(max(0.0, 1 - cf * cf))
            for sv in (sf, -sf):
                if all(abs(_eval_float(gq, {cname: cf, sname: sv})) < 1e-9 for gq in conditions):
                    if not any(abs(w[0] - cf) < 1e-9 and abs(w[1] - sv) < 1e-9 for w in witnesses):
                        witnesses.append((cf, sv))
    verdict = "reversible" if witnesses else "not_reversible"
    return ReversibilityResult(conditions, (cname, sname), verdict,
                               witnesses=witnesses, exact_witnesses=exact)


def _reduce_circle(g: MPoly, cname: str, sname: str):
    """Write g = A(c) + B(c) s modulo s^2 -> 1 - c^2; returns dense coefficient
    lists for A and B."""
    A: dict = {}
    B: dict = {}
    ic = g.vars.index(cname)
    isn = g.vars.index(sname)
    for e, coeff in g.terms.items():
        k = e[isn]
        m = e[ic]
        # s^k = (1-c^2)^(k//2) * s^(k%2)
        half = k // 2
        target = B if k % 2 else A
        for j in range(half + 1):
            from math import comb

            cc = coeff * comb(half, j) * (-1) ** j
            deg = m + 2 * j
            target[deg] = target.get(deg, Rat(0)) + cc
    size_a = max(A) + 1 if A else 0
    size_b = max(B) + 1 if B else 0
    a = [A.get(i, Rat(0)) for i in range(size_a)]
    b = [B.get(i, Rat(0)) for i in range(size_b)]
    return trim(a), trim(b)


def _poly_mul(a, b):
    a, b = trim(a), trim(b)
    if not a or not b:
        return []
    out = [Rat(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else Rat(0)) - (b[i] if i < len(b) else Rat(0))
                 for i in range(n)])


def _rat_sqrt(v) -> Optional[Rat]:
    if v < 0:
        return None
    import math as _m

    pn = _m.isqrt(int(v.numerator))
    pd = _m.isqrt(int(v.denominator))
    if pn * pn == v.numerator and pd * pd == v.denominator:
        return Rat(pn, pd)
    return None


def _eval_float(p: MPoly, point: dict) -> float:
    return p.eval_float(point)


# -- Darboux first integrals ---------------------------------------------------


@dataclass
class DarbouxExpr:
    """A candidate first integral: product of polynomial powers, an optional
    exponential of a rational function, and an optional factor
    exp(kappa * arg(u + i v)).

    Power exponents may be rationals or polynomials in the parameters (for
    exponents like -2c).  A rational-function base f = n/d contributes
    n^lam * d^(-lam).
    """

    power_factors: List[Tuple[Union[MPoly, RatFunc], Union[int, Rat, MPoly]]] = field(default_factory=list)
    exp_factor: Optional[Tuple[MPoly, MPoly]] = None  # exp(g/h)
    arg_factor: Optional[Tuple[Rat, MPoly, MPoly]] = None  # kappa, u, v

    def __post_init__(self):
        if not self.power_factors and self.exp_factor is None and self.arg_factor is None:
            raise ValueError("empty first-integral candidate")
        for f, _ in self.power_factors:
            if (f.is_zero if isinstance(f, MPoly) else f.is_zero):
                raise ValueError("zero power factor")
        if self.exp_factor is not None and self.exp_factor[1].is_zero:
            raise ValueError("zero denominator in exponential factor")


def verify_darboux_integral(s: PlaneSystem, H: DarbouxExpr) -> MPoly:
    """Residual numerator of dH/dt along the flow; identically zero iff H is
    a first integral wherever its factors are defined (u^2 + v^2 > 0 for the
    argument factor)."""
    table = s.vars
    factors: List[Tuple[MPoly, MPoly]] = []  # (f, lambda-as-poly)

    def lam_poly(l) -> MPoly:
        if isinstance(l, MPoly):
            return l.embed(table)
        return MPoly.const(table, l)

    for f, lam in H.power_factors:
        lp = lam_poly(lam)
        if isinstance(f, RatFunc):
            factors.append((f.num.embed(table), lp))
            if not f.den.is_constant:
                factors.append((f.den.embed(table), -lp))
            continue
        factors.append((f.embed(table), lp))

    F = MPoly.const(table, 1)
    for f, _ in factors:
        F = F * f
    h = H.exp_factor[1].embed(table) if H.exp_factor else MPoly.const(table, 1)
    if H.arg_factor:
        _, u, v = H.arg_factor
        u = u.embed(table)
        v = v.embed(table)
        W = u * u + v * v
    else:
        W = MPoly.const(table, 1)

    residual = MPoly.zero(table)
    for i, (f, lam) in enumerate(factors):
        fdot = lie_derivative(f, s)
        if fdot.is_zero:
            continue
        prod = lam * fdot
        for j, (fj, _) in enumerate(factors):
            if j != i:
                prod = prod * fj
        residual = residual + prod * (h * h) * W
    if H.exp_factor:
        g = H.exp_factor[0].embed(table)
        gdot = lie_derivative(g, s)
        hdot = lie_derivative(h, s)
        residual = residual + (gdot * h - g * hdot) * F * W
    if H.arg_factor:
        kappa, _, _ = H.arg_factor
        udot = lie_derivative(u, s)
        vdot = lie_derivative(v, s)
        residual = residual + (u * vdot - v * udot) * kappa * F * (h * h)
    return residual


# -- characteristic directions --------------------------------------------------


@dataclass
class Direction:
    """A candidate characteristic direction: the real linear factor
    beta*y - alpha*x of the lowest-degree part of x*Q - y*P."""

    form: Optional[MPoly]  # exact linear form when rational, else None
    angle: float           # direction angle in [0, pi)
    multiplicity: int
    exact: bool
    interval: Optional[Tuple[Rat, Rat]] = None

    def __str__(self) -> str:
        if self.form is not None:
            return f"{self.form} = 0"
        return f"direction at angle {self.angle:.6f} (isolated numerically)"


@dataclass
class CharacteristicDirections:
    lowest_degree: int
    lowest_form: MPoly
    directions: List[Direction]
    every_direction: bool = False  # x*Q - y*P identically zero

    @property
    def none_found(self) -> bool:
        return not self.directions and not self.every_direction


def characteristic_directions(s: PlaneSystem) -> CharacteristicDirections:
    """Real linear factors of the lowest-degree homogeneous part of
    x*Q - y*P (a necessary condition for an orbit to reach the origin with a
    definite tangent).  Parameters must be specialized."""
    if s.P.is_zero and s.Q.is_zero:
        raise ValueError("zero vector field")
    table = s.vars
    x = MPoly.variable("x", table)
    y = MPoly.variable("y", table)
    M = x * s.Q - y * s.P
    if M.is_zero:
        return CharacteristicDirections(-1, M, [], every_direction=True)
    d = min(sum(_xy_part(e, table)) for e in M.terms)
    B = M.homogeneous_part(d)
    used = set(B.variables_present()) - {"x", "y"}
    if used:
        raise ValueError(f"specialize parameters first: {sorted(used)}")
    ix = table.index("x")
    iy = table.index("y")
    coeffs = {}
    for e, c in B.terms.items():
        coeffs[e[iy]] = c
    b = [coeffs.get(k, Rat(0)) for k in range(d + 1)]
    b = trim(b)
    directions: List[Direction] = []
    x_mult = d - (len(b) - 1)
    if x_mult > 0:
        directions.append(Direction(x, math.pi / 2, x_mult, True))
    if len(b) > 1:
        rats = rational_roots(b)
        for lo, hi, ex in isolate_real_roots(b):
            if ex is not None:
                r = ex
                form = (y * Rat(r.denominator) - x * Rat(r.numerator)).primitive()
                mult = _multiplicity(b, r)
                directions.append(Direction(form, math.atan2(float(r), 1.0) % math.pi, mult, True))
            else:
                rf = refine_to_float(b, lo, hi)
                directions.append(Direction(None, math.atan2(rf, 1.0) % math.pi, 1, False,
                                            interval=(lo, hi)))
    directions.sort(key=lambda dd: dd.angle)
    return CharacteristicDirections(d, B, directions)


def _xy_part(e, table):
    return (e[table.index("x")], e[table.index("y")])


def _multiplicity(b, r) -> int:
    m = 0
    cur = trim(b)
    while cur and eval_poly(cur, r) == 0:
        # synthetic division by (t - r)
        out = []
        acc = Rat(0)
        for c in reversed(cur):
            acc = acc * r + c
            out.append(acc)
        quotient = list(reversed(out[:-1]))
        cur = trim(quotient)
        m += 1
    return m
