"""Degree-by-degree construction of a formal first integral and the
obstruction constants for elliptic, perturbed-nilpotent and
perturbed-degenerate linear parts.

The engine seeds H_2 (``(x^2+y^2)/2``, or ``(mu*x^2+y^2)/2`` when the linear
part is (y, -mu*x)) and solves one homogeneous linear system per degree n so
that the derivative of H along the flow is a combination of powers of
(x^2+y^2).  At even degrees the obstruction coefficient V is the unique value
making the degree-n equation solvable; the kernel ambiguity in H_n is fixed
by forcing the y^n coefficient to zero.  All arithmetic is exact; the
denominators of the H_n and of the V's are polynomials in eps only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Tuple

from .linalg import SingularMatrixError, bareiss_solve
from .mpoly import MPoly, poly_lcm
from .ratfunc import RatFunc
from .systems import (
    LINEAR_TYPE,
    PERTURBED_DEGENERATE,
    PERTURBED_NILPOTENT,
    ClassificationError,
    PlaneSystem,
    lie_derivative,
)

SUPPORTED_CLASSES = (LINEAR_TYPE, PERTURBED_NILPOTENT, PERTURBED_DEGENERATE)


class EngineError(RuntimeError):
    """Internal fault: the homological system degenerated beyond the expected
    one-dimensional obstruction.  Signals a convention or implementation
    problem, not a bad input."""


@dataclass
class ConventionRecord:
    """The normalization choices that pin the computed constants uniquely."""

    seed: str
    corrective_term: str = "(x^2+y^2)^(n/2)"
    kernel_rule: str = "coefficient of y^n in H_n is zero for even n >= 2"
    #: Computations seeded with the unnormalized quadratic x^2+y^2 (a common
    #: convention elsewhere) produce constants equal to this multiple of ours.
    unit_seed_scale: int = 2

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "corrective_term": self.corrective_term,
            "kernel_rule": self.kernel_rule,
            "unit_seed_scale": self.unit_seed_scale,
        }


@dataclass
class ConstantEntry:
    degree: int
    value: RatFunc
    index: Optional[int] = None  # 1-based among nonzero constants, degree order

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero


@dataclass
class LiapunovReport:
    system: PlaneSystem
    max_even_degree: int
    convention: ConventionRecord
    h_table: List[Tuple[int, RatFunc]]
    constants: List[ConstantEntry]
    side_conditions: List[MPoly] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def indexed(self) -> List[ConstantEntry]:
        """The nonzero constants, in order of appearance."""
        return [c for c in self.constants if c.index is not None]

    def constant_at_degree(self, degree: int) -> Optional[ConstantEntry]:
        for c in self.constants:
            if c.degree == degree:
                return c
        return None

    def first_nonzero(self) -> Optional[ConstantEntry]:
        idx = self.indexed
        return idx[0] if idx else None

    def all_zero(self) -> bool:
        return not self.indexed


def _state_indices(vars) -> Tuple[int, int]:
    return vars.index("x"), vars.index("y")


def _xy_coefficients(p: MPoly, n: int) -> Dict[int, MPoly]:
    """Decompose an x,y-homogeneous polynomial of degree n: maps t to the
    (x,y)-free coefficient of x^(n-t) y^t."""
    ix, iy = _state_indices(p.vars)
    out: Dict[int, dict] = {}
    for e, c in p.terms.items():
        if e[ix] + e[iy] != n:
            raise ValueError(f"polynomial is not x,y-homogeneous of degree {n}")
        t = e[iy]
        e2 = list(e)
        e2[ix] = 0
        e2[iy] = 0
        out.setdefault(t, {})[tuple(e2)] = c
    return {t: MPoly(p.vars, d) for t, d in out.items()}


def _monomial_xy(vars, i: int, j: int) -> MPoly:
    ix, iy = _state_indices(vars)
    e = [0] * len(vars)
    e[ix] = i
    e[iy] = j
    return MPoly.monomial(vars, e)


def _circle_power(vars, half: int) -> MPoly:
    """(x^2 + y^2)^half."""
    acc = MPoly.zero(vars)
    for k in range(half + 1):
        acc = acc + _monomial_xy(vars, 2 * (half - k), 2 * k) * comb(half, k)
    return acc


def _seed(system: PlaneSystem) -> Tuple[MPoly, MPoly]:
    """H_2 as (numerator, denominator): (x^2+y^2)/2, with the x^2 weighted by
    the perturbation factor for a perturbed-nilpotent linear part."""
    vars = system.vars
    if system.linear_class == PERTURBED_NILPOTENT:
        mu = system.eps_factor
        num = _monomial_xy(vars, 2, 0) * mu + _monomial_xy(vars, 0, 2)
    else:
        num = _monomial_xy(vars, 2, 0) + _monomial_xy(vars, 0, 2)
    return num, MPoly.const(vars, 2)


class _HomologicalOperator:
    """L(H) = H_x * P_1 + H_y * Q_1 restricted to x,y-homogeneous degree n."""

    def __init__(self, system: PlaneSystem):
        self.vars = system.vars
        p1, q1 = system.linear_part()
        self.p1 = p1
        self.q1 = q1

    def apply(self, poly: MPoly) -> MPoly:
        return poly.diff("x") * self.p1 + poly.diff("y") * self.q1

    def matrix(self, n: int) -> List[List[MPoly]]:
        """Matrix of L on the basis x^n, x^(n-1) y, ..., y^n (column order)."""
        cols = []
        for t in range(n + 1):
            img = self.apply(_monomial_xy(self.vars, n - t, t))
            cols.append(_xy_coefficients(img, n) if img else {})
        zero = MPoly.zero(self.vars)
        return [[cols[t].get(s, zero) for t in range(n + 1)] for s in range(n + 1)]


def solve_homological_step(system: PlaneSystem, residual: MPoly,
                           degree: Optional[int] = None,
                           pivot: str = "first"):
    """Solve L(H_n) = -residual (+ V*(x^2+y^2)^(n/2) at even n).

    ``residual`` must be x,y-homogeneous; returns (H_n, V) with H_n a
    rational-function pair (numerator over an eps-only denominator) and V a
    RatFunc for even n, None for odd n.
    """
    if system.linear_class not in SUPPORTED_CLASSES:
        raise ClassificationError(f"unsupported linear class {system.linear_class!r}")
    if degree is None:
        degree = residual.degree_in_state()
        if degree < 0:
            raise ValueError("degree required for a zero residual")
    vars = system.vars
    den = MPoly.const(vars, 1)
    H_num, V = _solve_degree(_HomologicalOperator(system), degree,
                             residual, den, pivot=pivot)
    return H_num, V


def _solve_degree(op: _HomologicalOperator, n: int, R_num: MPoly, R_den: MPoly,
                  pivot: str = "first"):
    """Core solve at degree n with residual R_num / R_den.

    Returns (H_n as RatFunc, V as RatFunc or None)."""
    vars = op.vars
    even = n % 2 == 0
    A = op.matrix(n)
    rhs_coeffs = _xy_coefficients(R_num, n) if not R_num.is_zero else {}
    zero = MPoly.zero(vars)
    rhs = [-(rhs_coeffs.get(s, zero)) for s in range(n + 1)]

    if even:
        circle = _xy_coefficients(_circle_power(vars, n // 2), n)
        M = [[A[s][t] for t in range(n)] + [-(circle.get(s, zero))]
             for s in range(n + 1)]
    else:
        M = A
    try:
        nums, det = bareiss_solve(M, rhs, pivot=pivot)
    except SingularMatrixError as exc:
        raise EngineError(
            f"homological system at degree {n} is singular beyond the expected "
            f"one-dimensional obstruction: {exc}") from exc

    full_den = det * R_den
    if even:
        coeff_nums, v_num = nums[:-1], nums[-1]
        V = RatFunc(v_num, full_den)
    else:
        coeff_nums, V = nums, None
    H_num = MPoly.zero(vars)
    for t, num in enumerate(coeff_nums):
        if not num.is_zero:
            H_num = H_num + num * _monomial_xy(vars, n - t, t)
    return RatFunc(H_num, full_den), V


def compute_liapunov_constants(system: PlaneSystem, max_even_degree: int,
                               pivot: str = "first") -> LiapunovReport:
    """Run the degree-by-degree scheme up to ``max_even_degree``.

    The linear class must be linear_type, perturbed_nilpotent or
    perturbed_degenerate.  Absence of obstructions up to the truncation
    degree is evidence, not a proof of a center; the report carries a
    warning to that effect.
    """
    if system.linear_class not in SUPPORTED_CLASSES:
        raise ClassificationError(
            f"Liapunov computation needs a linear_type, perturbed_nilpotent or "
            f"perturbed_degenerate system, got {system.linear_class!r}; apply a "
            "linear change of variables to reach one of the normal forms "
            "(-y, x), (y, 0), (0, 0), (y, -eps*x), (eps*y, -eps*x)")
    if max_even_degree < 4:
        raise ValueError("max_even_degree must be at least 4")
    vars = system.vars
    op = _HomologicalOperator(system)
    parts = system.nonlinear_parts()
    seed_num, seed_den = _seed(system)

    h_store: Dict[int, Tuple[MPoly, MPoly]] = {2: (seed_num, seed_den)}
    h_table: List[Tuple[int, RatFunc]] = [(2, RatFunc(seed_num, seed_den))]
    constants: List[ConstantEntry] = []

    for n in range(3, max_even_degree + 1):
        pieces = []
        for k, (hnum, hden) in h_store.items():
            d = n + 1 - k
            if d < 2 or d not in parts:
                continue
            pd, qd = parts[d]
            piece = hnum.diff("x") * pd + hnum.diff("y") * qd
            if piece:
                pieces.append((piece, hden))
        if pieces:
            D = pieces[0][1]
            for _, dk in pieces[1:]:
                D = poly_lcm(D, dk)
            R_num = MPoly.zero(vars)
            for piece, dk in pieces:
                m = D.try_div(dk)
                R_num = R_num + piece * m
        else:
            D = MPoly.const(vars, 1)
            R_num = MPoly.zero(vars)

        H_n, V = _solve_degree(op, n, R_num, D, pivot=pivot)
        h_store[n] = (H_n.num, H_n.den)
        h_table.append((n, H_n))
        if n % 2 == 0:
            constants.append(ConstantEntry(degree=n, value=V))

    idx = 0
    for entry in constants:
        if not entry.is_zero:
            idx += 1
            entry.index = idx

    seed_desc = ("(mu*x^2+y^2)/2 with mu = " + str(system.eps_factor)
                 if system.linear_class == PERTURBED_NILPOTENT
                 else "(x^2+y^2)/2")
    report = LiapunovReport(
        system=system,
        max_even_degree=max_even_degree,
        convention=ConventionRecord(seed=seed_desc),
        h_table=h_table,
        constants=constants,
        warnings=[
            "no obstruction up to the truncation degree is evidence, not a "
            "center proof: a center requires all constants to vanish"
        ] if not [c for c in constants if not c.is_zero] else [],
    )
    return report


def verify_backsubstitution(report: LiapunovReport) -> bool:
    """Exact check of the defining identity: the Lie derivative of the summed
    H equals the recorded combination of (x^2+y^2) powers through the
    truncation degree."""
    s = report.system
    vars = s.vars
    D = MPoly.const(vars, 1)
    for _, h in report.h_table:
        D = poly_lcm(D, h.den)
    for c in report.constants:
        D = poly_lcm(D, c.value.den)
    H_scaled = MPoly.zero(vars)
    for _, h in report.h_table:
        H_scaled = H_scaled + h.num * D.try_div(h.den)
    residual = lie_derivative(H_scaled, s)
    for c in report.constants:
        residual = residual - c.value.num * D.try_div(c.value.den) * _circle_power(vars, c.degree // 2)
    for d in range(0, report.max_even_degree + 1):
        if residual.homogeneous_part(d):
            return False
    return True


def count_independent_constants(report: LiapunovReport) -> int:
    """Number of constants that stay nonzero after substituting the solved
    varieties of the earlier ones (when those solve as explicit parameter
    eliminations).  When an earlier condition is not explicitly solvable the
    later count is undetermined and a warning is recorded on the report."""
    subs: Dict[str, object] = {}
    count = 0
    undetermined_from = None
    for entry in report.indexed:
        v = entry.value.subs(subs, entry.value.vars) if subs else entry.value
        if v.is_zero:
            continue
        count += 1
        sol = _explicit_elimination(v.num, report.system.params, subs)
        if sol is None:
            if entry is not report.indexed[-1]:
                undetermined_from = entry.degree
            break
        subs[sol[0]] = sol[1]
    if undetermined_from is not None:
        report.warnings.append(
            f"independence beyond the constant at degree {undetermined_from} "
            "is undetermined (no explicit parameter elimination)")
    return count


def _explicit_elimination(num: MPoly, params, existing) -> Optional[Tuple[str, MPoly]]:
    """Solve num = 0 (identically in eps) for one parameter appearing
    linearly with constant coefficient, if possible."""
    for p in params:
        if p in existing or p not in num.vars:
            continue
        if num.degree_in(p) != 1:
            continue
        by_p = num.coefficients_in(p)
        lead = by_p.get(1)
        rest = by_p.get(0, MPoly.zero(num.vars))
        if lead is None:
            continue
        # lead must be a constant multiple of an eps-only polynomial dividing rest
        if any(v not in ("eps",) for v in lead.variables_present()):
            continue
        q = rest.try_div(-lead)
        if q is None:
            continue
        if "eps" in q.variables_present():
            continue
        return p, q
    return None
