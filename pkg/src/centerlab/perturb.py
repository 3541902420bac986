"""Perturbation builders and extraction of center conditions.

A nilpotent system (y + F1, F2) is embedded in the family
(y + F1 + eps*x*G1, -eps*x + F2 + eps*x*G2); a degenerate system in
(eps*y + F1 + eps*G1, -eps*x + F2 + eps*G2); a Hamiltonian degenerate system
in (-eps*y + F1, eps*x + F2).  For eps > 0 (nilpotent) or eps != 0 small
(degenerate) the perturbed family is of linear type, so the elliptic
machinery applies, and center conditions for the original system fall out of
the eps-order analysis of the obstruction constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .liapunov import LiapunovReport, compute_liapunov_constants
from .mpoly import MPoly, Rat, merge_tables
from .ratfunc import RatFunc, laurent_expand_eps
from .systems import (
    DEGENERATE,
    NILPOTENT,
    ClassificationError,
    PlaneSystem,
    substitute,
)

ALL_ORDERS = "all_orders"
FIRST_ORDER = "first_order"


@dataclass
class PerturbationSpec:
    """How to embed a nilpotent or degenerate system in an elliptic family.

    ``nilpotent``: G1, G2 enter multiplied by eps*x and must have no constant
    term.  ``degenerate``: G1, G2 enter multiplied by eps and must lack
    constant and linear terms.  ``hamiltonian``: bare rotation only.
    """

    kind: str  # nilpotent | degenerate | hamiltonian
    G1: Optional[MPoly] = None
    G2: Optional[MPoly] = None

    def __post_init__(self):
        if self.kind not in ("nilpotent", "degenerate", "hamiltonian"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.kind == "hamiltonian":
            if (self.G1 and not self.G1.is_zero) or (self.G2 and not self.G2.is_zero):
                raise ValueError("hamiltonian perturbation takes no G terms")
        for g in (self.G1, self.G2):
            if g is None or g.is_zero:
                continue
            if not g.homogeneous_part(0).is_zero:
                raise ValueError("G terms must have no constant term")
            if self.kind == "degenerate" and not g.homogeneous_part(1).is_zero:
                raise ValueError("degenerate-kind G terms must have no linear part")


def minimal_perturbation(kind: str) -> PerturbationSpec:
    return PerturbationSpec(kind)


def general_perturbation(system: PlaneSystem, degree: int = 5,
                         kind: Optional[str] = None) -> PerturbationSpec:
    """Fill G1, G2 with fresh parameters a_ij, b_ij up to total degree
    ``degree`` (from degree 1 for a nilpotent system, degree 2 for a
    degenerate one)."""
    if kind is None:
        kind = "nilpotent" if system.linear_class == NILPOTENT else "degenerate"
    lo = 1 if kind == "nilpotent" else 2
    names = []
    for prefix in ("a", "b"):
        for d in range(lo, degree + 1):
            for i in range(d + 1):
                names.append(f"{prefix}{i}{d - i}")
    clash = set(names) & set(system.params)
    if clash:
        raise ValueError(
            f"perturbation parameter names collide with system parameters: {sorted(clash)}")
    table = merge_tables(system.vars, names)

    def fill(prefix):
        g = MPoly.zero(table)
        for d in range(lo, degree + 1):
            for i in range(d + 1):
                coeff = MPoly.variable(f"{prefix}{i}{d - i}", table)
                ix, iy = table.index("x"), table.index("y")
                e = [0] * len(table)
                e[ix] = i
                e[iy] = d - i
                g = g + coeff * MPoly.monomial(table, e)
        return g

    return PerturbationSpec(kind, fill("a"), fill("b"))


def build_perturbation(system: PlaneSystem, spec: PerturbationSpec) -> PlaneSystem:
    """Embed the system in its eps-family according to ``spec``.

    Substituting eps = 0 in the result returns the original system exactly.
    """
    cls = system.linear_class
    if spec.kind == "nilpotent":
        if cls != NILPOTENT:
            raise ClassificationError(
                f"nilpotent perturbation needs a nilpotent system, got {cls}")
    else:
        if cls != DEGENERATE:
            raise ClassificationError(
                f"{spec.kind} perturbation needs a degenerate system, got {cls}")

    extra = tuple(v for g in (spec.G1, spec.G2) if g is not None
                  for v in g.variables_present() if v not in ("x", "y", "eps"))
    table = merge_tables(system.vars, extra)
    P = system.P.embed(table)
    Q = system.Q.embed(table)
    x = MPoly.variable("x", table)
    y = MPoly.variable("y", table)
    eps = MPoly.variable("eps", table)
    G1 = spec.G1.embed(table) if spec.G1 is not None else MPoly.zero(table)
    G2 = spec.G2.embed(table) if spec.G2 is not None else MPoly.zero(table)

    if spec.kind == "nilpotent":
        # respect the overall scaling of the (y, 0) linear part so the
        # perturbed part stays elliptic
        sigma = P.homogeneous_part(1).coefficients_in("y")[1].constant_value()
        P2 = P + eps * x * G1
        Q2 = Q - (eps * x) * sigma + eps * x * G2
    elif spec.kind == "degenerate":
        P2 = P + eps * y + eps * G1
        Q2 = Q - eps * x + eps * G2
    else:  # hamiltonian
        P2 = P - eps * y
        Q2 = Q + eps * x
    params = tuple(v for v in table if v not in ("x", "y", "eps"))
    return PlaneSystem(P2, Q2, params, system.assumptions)


@dataclass
class Condition:
    """A single polynomial condition arising at one eps order of a constant."""

    poly: MPoly                      # in parameters only, primitive
    eps_order: int
    constant_index: int              # which V (1-based) produced it
    kind: str                        # base | perturbation | mixed
    solved: Optional[Tuple[str, MPoly]] = None  # parameter eliminated, value

    def __str__(self) -> str:
        return f"{self.poly} = 0"


@dataclass
class CenterConditions:
    mode: str
    base_conditions: List[Condition] = field(default_factory=list)
    perturbation_conditions: List[Condition] = field(default_factory=list)
    mixed_conditions: List[Condition] = field(default_factory=list)
    side_conditions: List[MPoly] = field(default_factory=list)
    constants: List[Tuple[int, int, RatFunc]] = field(default_factory=list)  # (index, degree, V)
    warnings: List[str] = field(default_factory=list)

    def base_polys(self) -> List[MPoly]:
        return [c.poly for c in self.base_conditions]


def _reduce_modulo(poly: MPoly, conditions: Sequence[MPoly]) -> MPoly:
    """Multivariate reduction of ``poly`` by the leading terms of the
    conditions (graded lex).  Repeats until no term is divisible."""
    if poly.is_zero or not conditions:
        return poly
    changed = True
    guard = 0
    while changed and not poly.is_zero and guard < 1000:
        changed = False
        guard += 1
        for c in conditions:
            if c.is_zero:
                continue
            lm = c.leading_monomial()
            lc = c.terms[lm]
            for e in list(poly.terms):
                q = tuple(i - j for i, j in zip(e, lm))
                if any(k < 0 for k in q):
                    continue
                coeff = poly.terms[e] / lc
                poly = poly - c * (coeff * MPoly.monomial(poly.vars, q))
                changed = True
                break
            if poly.is_zero:
                break
    return poly


def _linear_solve_for(poly: MPoly, names: Sequence[str]) -> Optional[Tuple[str, MPoly]]:
    """Solve poly = 0 for the first listed parameter that appears linearly
    with a constant coefficient."""
    for p in names:
        if p not in poly.vars or poly.degree_in(p) != 1:
            continue
        by_p = poly.coefficients_in(p)
        lead = by_p.get(1)
        if lead is None or not lead.is_constant:
            continue
        rest = by_p.get(0, MPoly.zero(poly.vars))
        value = rest * (Rat(-1) / lead.constant_value())
        if p in value.variables_present():
            continue
        return p, value
    return None


def extract_center_conditions(report: LiapunovReport, mode: str = ALL_ORDERS,
                              perturbation_params: Sequence[str] = ()) -> CenterConditions:
    """Turn the constants of one report into polynomial conditions by eps
    order.  ``all_orders``: every Laurent coefficient of every nonzero
    constant must vanish.  ``first_order``: only the two lowest orders
    present in each constant are used."""
    out = CenterConditions(mode=mode)
    pset = set(perturbation_params)
    base = [p for p in report.system.params if p not in pset]
    for entry in report.indexed:
        series = laurent_expand_eps(entry.value, _order_bound(entry.value))
        if series.side_condition is not None:
            out.side_conditions.append(series.side_condition)
        items = series.items()
        if mode == FIRST_ORDER:
            orders = sorted(k for k, c in items if not c.is_zero)[:2]
            items = [(k, c) for k, c in items if k in orders]
        out.constants.append((entry.index, entry.degree, entry.value))
        for k, coeff in items:
            poly = coeff.num.primitive().embed(report.system.vars)
            if poly.is_zero:
                continue
            present = set(poly.variables_present())
            if present <= set(base):
                kind = "base"
            elif present <= pset:
                kind = "perturbation"
            else:
                kind = "mixed"
            cond = Condition(poly, k, entry.index, kind)
            {"base": out.base_conditions,
             "perturbation": out.perturbation_conditions,
             "mixed": out.mixed_conditions}[kind].append(cond)
    return out


def _order_bound(v: RatFunc) -> int:
    num_top = v.num.degree_in("eps") if "eps" in v.num.vars else 0
    den_low = 0
    if "eps" in v.den.vars and not v.den.is_constant:
        den_by = v.den.coefficients_in("eps")
        den_low = min(den_by)
    return max(num_top - den_low, 0)


@dataclass
class SingularitySample:
    eps: object                     # the sampled eps value (rational)
    distance: Optional[float]       # closest non-origin singularity, None if none found
    witness: Optional[Tuple[float, float]] = None


@dataclass
class VanishingSingularityCheck:
    """Numeric evidence for/against singular points collapsing into the
    origin as eps -> 0.  Not a proof."""

    passed: bool
    samples: List[SingularitySample]
    note: str = "numeric sampling evidence, not a proof"


def check_no_vanishing_singularities(family: PlaneSystem, eps_samples: Sequence,
                                     radius=Rat(1)) -> VanishingSingularityCheck:
    """Locate non-origin singular points of each eps-specialization inside the
    disk and test whether their minimal distance shrinks toward zero.

    Fails (with witnesses) when the distances decrease monotonically by a
    ratio of at most 3/4 between consecutive samples; passes otherwise.
    """
    if family.linear_class not in ("perturbed_nilpotent", "perturbed_degenerate"):
        raise ValueError("family must be a perturbed class with symbolic eps")
    eps_list = sorted((Rat(e) for e in eps_samples), reverse=True)
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps samples must be positive")
    samples = []
    for e in eps_list:
        spec = substitute(family, {"eps": e})
        pts = _singular_points_numeric(spec, float(radius))
        if pts:
            d, w = min(((float((px ** 2 + py ** 2) ** 0.5), (px, py)) for px, py in pts),
                       key=lambda t: t[0])
            samples.append(SingularitySample(e, d, w))
        else:
            samples.append(SingularitySample(e, None))
    dists = [s.distance for s in samples]
    if all(d is None for d in dists):
        return VanishingSingularityCheck(True, samples)
    if any(d is None for d in dists):
        # singularities appear only for some eps: no collapsing sequence
        return VanishingSingularityCheck(True, samples)
    shrinking = all(b <= 0.75 * a for a, b in zip(dists, dists[1:]))
    return VanishingSingularityCheck(not (shrinking and len(dists) >= 2), samples)


def _singular_points_numeric(s: PlaneSystem, radius: float) -> List[Tuple[float, float]]:
    """Non-origin real solutions of P = Q = 0 inside the disk (numeric)."""
    from .linalg import sylvester_resultant
    from .mpoly import poly_gcd
    from .numeric import compile_system
    from .realroots import isolate_real_roots, refine_to_float

    pts: List[Tuple[float, float]] = []
    g = poly_gcd(s.P, s.Q)
    f = compile_system(s)

    def newton_polish(x0, y0):
        Px, Py = s.P.diff("x"), s.P.diff("y")
        Qx, Qy = s.Q.diff("x"), s.Q.diff("y")
        ev = lambda p, x, y: p.eval_float({"x": x, "y": y})
        x, y = x0, y0
        for _ in range(40):
            p, q = f(x, y)
            a, b, c, d = ev(Px, x, y), ev(Py, x, y), ev(Qx, x, y), ev(Qy, x, y)
            det = a * d - b * c
            if abs(det) < 1e-300:
                return None
            dx = (p * d - q * b) / det
            dy = (a * q - c * p) / det
            x, y = x - dx, y - dy
            if abs(dx) + abs(dy) < 1e-14 * (1 + abs(x) + abs(y)):
                break
        p, q = f(x, y)
        if abs(p) + abs(q) < 1e-9:
            return (x, y)
        return None

    if not g.is_constant:
        # a whole curve of singular points: minimize the distance along rays
        gx = g
        for k in range(720):
            th = 2 * math.pi * k / 720
            cs, sn = math.cos(th), math.sin(th)
            coeffs = _ray_poly(gx, cs, sn)
            for r in _real_roots_float(coeffs):
                if 1e-9 < r <= radius:
                    pts.append((r * cs, r * sn))
        P1 = s.P.try_div(g)
        Q1 = s.Q.try_div(g)
    else:
        P1, Q1 = s.P, s.Q

    if not P1.is_zero and not Q1.is_zero and P1.degree_in("y") + Q1.degree_in("y") > 0:
        try:
            res = sylvester_resultant(P1, Q1, "y")
        except ValueError:
            res = None
        if res is not None and not res.is_zero:
            ix = res.vars.index("x")
            coeffs = [Rat(0)] * (res.degree_in("x") + 1)
            for e, c in res.terms.items():
                coeffs[e[ix]] += c
            for lo, hi, ex in isolate_real_roots(coeffs):
                xr = float(ex) if ex is not None else refine_to_float(coeffs, lo, hi)
                if abs(xr) > radius:
                    continue
                for yr in _y_candidates(P1, Q1, xr, radius):
                    pol = newton_polish(xr, yr)
                    if pol is None:
                        continue
                    x2, y2 = pol
                    if x2 * x2 + y2 * y2 <= radius * radius and x2 * x2 + y2 * y2 > 1e-16:
                        if not any(abs(x2 - a) + abs(y2 - b) < 1e-7 for a, b in pts):
                            pts.append((x2, y2))
    return pts


def _ray_poly(g: MPoly, cs: float, sn: float):
    ix = g.vars.index("x")
    iy = g.vars.index("y")
    dense: Dict[int, float] = {}
    for e, c in g.terms.items():
        d = e[ix] + e[iy]
        dense[d] = dense.get(d, 0.0) + float(c) * cs ** e[ix] * sn ** e[iy]
    top = max(dense) if dense else 0
    return [dense.get(k, 0.0) for k in range(top + 1)]


def _real_roots_float(coeffs) -> List[float]:
    import numpy as np

    arr = list(coeffs)
    while arr and abs(arr[-1]) < 1e-300:
        arr.pop()
    if len(arr) <= 1:
        return []
    roots = np.roots(list(reversed(arr)))
    return [float(r.real) for r in roots if abs(r.imag) < 1e-9]


def _y_candidates(P1: MPoly, Q1: MPoly, xr: float, radius: float) -> List[float]:
    out = []
    for poly in (P1, Q1):
        iy = poly.vars.index("y")
        ix = poly.vars.index("x")
        dense: Dict[int, float] = {}
        for e, c in poly.terms.items():
            dense[e[iy]] = dense.get(e[iy], 0.0) + float(c) * xr ** e[ix]
        top = max(dense) if dense else 0
        for r in _real_roots_float([dense.get(k, 0.0) for k in range(top + 1)]):
            if abs(r) <= radius * 1.5:
                out.append(r)
        if out:
            break
    return out


@dataclass
class PipelineResult(CenterConditions):
    """Center conditions accumulated over the staged computation, where each
    solved condition is substituted before the next constant is computed."""

    reports: List[LiapunovReport] = field(default_factory=list)
    substitutions: Dict[str, MPoly] = field(default_factory=dict)


def center_conditions_pipeline(perturbed: PlaneSystem, max_even_degree: int,
                               mode: str = ALL_ORDERS,
                               perturbation_params: Sequence[str] = (),
                               pivot: str = "first") -> PipelineResult:
    """Stage-wise center-condition extraction.

    Computes constants degree by degree; at the first nonzero constant its
    eps-order conditions are classified (base / perturbation / mixed),
    linearly solvable ones are substituted into the family, and the
    computation restarts on the reduced family.  Base conditions are reported
    reduced modulo the earlier ones.
    """
    result = PipelineResult(mode=mode)
    current = perturbed
    full_table = perturbed.vars
    pset = set(perturbation_params)
    index = 0
    floor = 0
    while True:
        report = compute_liapunov_constants(current, max_even_degree, pivot=pivot)
        result.reports.append(report)
        first = next((c for c in report.constants
                      if c.degree > floor and not c.is_zero), None)
        if first is None:
            break
        index += 1
        floor = first.degree
        result.constants.append((index, first.degree, first.value))
        series = laurent_expand_eps(first.value, _order_bound(first.value))
        if series.side_condition is not None:
            result.side_conditions.append(series.side_condition)
        items = series.items()
        if mode == FIRST_ORDER:
            orders = sorted(k for k, c in items if not c.is_zero)[:2]
            items = [(k, c) for k, c in items if k in orders]

        new_subs: Dict[str, MPoly] = {}
        # reduce only by conditions that were not eliminated by substitution;
        # the solved ones are already out of the family, and rewriting by
        # their leading terms would reintroduce eliminated parameters
        reducers = [c.poly for c in result.base_conditions if c.solved is None]
        for k, coeff in items:
            poly = coeff.num.primitive().embed(current.vars)
            if new_subs:
                poly = poly.subs(new_subs, current.vars)
            poly = _reduce_modulo(poly.embed(full_table), reducers).primitive()
            if poly.is_zero:
                continue
            present = set(poly.variables_present())
            if present & pset:
                sol = _linear_solve_for(poly, [p for p in current.params if p in pset])
                if sol is not None:
                    cond = Condition(poly, k, index,
                                     "perturbation" if present <= pset else "mixed",
                                     solved=sol)
                    result.perturbation_conditions.append(cond)
                    new_subs[sol[0]] = sol[1].embed(current.vars)
                else:
                    result.mixed_conditions.append(Condition(poly, k, index, "mixed"))
            else:
                cond = Condition(poly, k, index, "base")
                result.base_conditions.append(cond)
                sol = _linear_solve_for(poly, [p for p in current.params if p not in pset])
                if sol is not None:
                    cond.solved = sol
                    new_subs[sol[0]] = sol[1].embed(current.vars)
                else:
                    reducers.append(poly)
        if new_subs:
            result.substitutions.update(new_subs)
            current = substitute(current, new_subs)
    return result
