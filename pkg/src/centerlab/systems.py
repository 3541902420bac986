"""Planar polynomial systems: classification, decomposition, Lie derivative."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Tuple

from .mpoly import MPoly, Rat, merge_tables
from .parser import Assumption, parse_system_source

LINEAR_TYPE = "linear_type"
NILPOTENT = "nilpotent"
DEGENERATE = "degenerate"
PERTURBED_NILPOTENT = "perturbed_nilpotent"
PERTURBED_DEGENERATE = "perturbed_degenerate"
#: linear part outside the supported normal forms: usable by the numeric and
#: structural analyses, rejected by the exact engines
OTHER = "other"


class ClassificationError(ValueError):
    pass


class AssumptionError(ValueError):
    pass


@dataclass(frozen=True)
class PlaneSystem:
    """A planar system xdot = P(x,y), ydot = Q(x,y) with a singular origin.

    The exact machinery works on nonzero rational multiples of the normal
    forms

    * ``linear_type``          (-y, x)
    * ``nilpotent``            (y, 0)
    * ``degenerate``           (0, 0)
    * ``perturbed_nilpotent``  (y, -eps*x)
    * ``perturbed_degenerate`` (eps*y, -eps*x)

    For the perturbed classes the role of eps may also be played by a
    positive rational constant (a specialized perturbation strength), kept
    in ``eps_factor``.  Any other linear part is classified ``other``: the
    numeric and structural analyses still apply, the exact engines reject it
    with a pre-normalization message.
    """

    P: MPoly
    Q: MPoly
    params: Tuple[str, ...] = ()
    assumptions: Tuple[Assumption, ...] = ()
    linear_class: str = field(init=False)
    eps_factor: Optional[MPoly] = field(init=False, default=None)

    def __post_init__(self):
        self.P._check(self.Q)
        cls, eps_factor = _classify(self.P, self.Q)
        object.__setattr__(self, "linear_class", cls)
        object.__setattr__(self, "eps_factor", eps_factor)

    # -- views ------------------------------------------------------------

    @property
    def vars(self) -> Tuple[str, ...]:
        return self.P.vars

    def linear_part(self) -> Tuple[MPoly, MPoly]:
        return (self.P.homogeneous_part(1), self.Q.homogeneous_part(1))

    def nonlinear_parts(self) -> dict:
        """Maps degree (>= 2) to (P_d, Q_d), skipping zero pairs."""
        out = {}
        top = max(self.P.degree_in_state(), self.Q.degree_in_state(), 1)
        for d in range(2, top + 1):
            pd = self.P.homogeneous_part(d)
            qd = self.Q.homogeneous_part(d)
            if pd or qd:
                out[d] = (pd, qd)
        return out

    def is_numeric(self) -> bool:
        used = set(self.P.variables_present()) | set(self.Q.variables_present())
        return used <= {"x", "y"}

    def __str__(self) -> str:
        return format_system(self)


def _linear_coefficients(P: MPoly, Q: MPoly):
    """Coefficients of x and y in the degree-1 parts, as polynomials in the
    remaining variables."""
    ix = P.vars.index("x")
    iy = P.vars.index("y")

    def split(p):
        cx = {}
        cy = {}
        for e, c in p.homogeneous_part(1).terms.items():
            e2 = list(e)
            if e[ix] == 1:
                e2[ix] = 0
                cx[tuple(e2)] = c
            else:
                e2[iy] = 0
                cy[tuple(e2)] = c
        return MPoly(p.vars, cx), MPoly(p.vars, cy)

    return split(P) + split(Q)


def _eps_monomial_value(p: MPoly) -> Optional[MPoly]:
    """p itself when p = c*eps with c > 0 rational, or a positive constant."""
    if p.is_zero:
        return None
    if p.is_constant:
        return p if p.constant_value() > 0 else None
    if len(p.terms) != 1:
        return None
    [(e, c)] = p.terms.items()
    ie = p.vars.index("eps") if "eps" in p.vars else None
    if ie is None:
        return None
    if e[ie] == 1 and sum(e) == 1 and c > 0:
        return p
    return None


def _classify(P: MPoly, Q: MPoly):
    for p, name in ((P, "xdot"), (Q, "ydot")):
        c = p.homogeneous_part(0)
        if not c.is_zero:
            raise ClassificationError(
                f"{name} has a nonzero constant term; the origin must be a singular point")
    a_p, b_p, a_q, b_q = _linear_coefficients(P, Q)
    if not a_p.is_zero or not b_q.is_zero:
        return OTHER, None
    if a_q.is_zero and b_p.is_zero:
        return DEGENERATE, None
    if a_q.is_zero:
        if b_p.is_constant:
            return NILPOTENT, None
        return OTHER, None
    if b_p.is_zero:
        return OTHER, None
    # both b_p and a_q nonzero: rotation-like
    if b_p.is_constant:
        sigma = b_p.constant_value()
        if a_q.is_constant and sigma == -a_q.constant_value():
            return LINEAR_TYPE, None
        # (sigma*y, -sigma*mu*x) with mu = eps, c*eps (c > 0), or a positive
        # rational: a perturbed nilpotent part, possibly with eps specialized
        mu = _eps_monomial_value(a_q * (Rat(-1) / sigma))
        if mu is not None:
            return PERTURBED_NILPOTENT, mu
        return OTHER, None
    if (b_p + a_q).is_zero:
        mu = _eps_monomial_value(b_p) or _eps_monomial_value(-b_p)
        if mu is not None:
            return PERTURBED_DEGENERATE, mu
    return OTHER, None


def parse_system(text: str) -> PlaneSystem:
    """Parse system text (see the grammar in :mod:`centerlab.parser`)."""
    parsed = parse_system_source(text)
    return PlaneSystem(parsed.P, parsed.Q, parsed.params, parsed.assumptions)


def make_system(xdot: str, ydot: str, params: str = "") -> PlaneSystem:
    header = f"params: {params}\n" if params else ""
    return parse_system(f"{header}xdot = {xdot}; ydot = {ydot}")


@dataclass
class HomogeneousDecomposition:
    parts: List[Tuple[int, MPoly, MPoly]]

    def reassemble(self, vars) -> Tuple[MPoly, MPoly]:
        P = MPoly.zero(vars)
        Q = MPoly.zero(vars)
        for _, pd, qd in self.parts:
            P = P + pd
            Q = Q + qd
        return P, Q


def homogeneous_parts(s: PlaneSystem) -> HomogeneousDecomposition:
    """Split (P, Q) into components homogeneous in x, y, degrees ascending."""
    parts = []
    top = max(s.P.degree_in_state(), s.Q.degree_in_state(), 0)
    for d in range(0, top + 1):
        pd = s.P.homogeneous_part(d)
        qd = s.Q.homogeneous_part(d)
        if pd or qd:
            parts.append((d, pd, qd))
    return HomogeneousDecomposition(parts)


def lie_derivative(H: MPoly, s: PlaneSystem) -> MPoly:
    """Derivative of H along the flow: H_x P + H_y Q."""
    H._check(s.P)
    return H.diff("x") * s.P + H.diff("y") * s.Q


def substitute(s: PlaneSystem, bindings: Mapping[str, object]) -> PlaneSystem:
    """Specialize parameters and/or eps; x and y cannot be bound.

    Fully-determined assumptions are checked and raise AssumptionError when
    violated; open assumptions are carried over.
    """
    for k in bindings:
        if k in ("x", "y"):
            raise ValueError("cannot bind a state variable")
        if k != "eps" and k not in s.params:
            raise ValueError(f"unknown symbol {k!r}")
    extra = set()
    for v in bindings.values():
        if isinstance(v, MPoly):
            extra.update(v.variables_present())
    remaining = [p for p in s.params if p not in bindings]
    table = merge_tables(("x", "y", "eps"), remaining, tuple(extra))
    clean = {}
    for k, v in bindings.items():
        clean[k] = v.embed(table) if isinstance(v, MPoly) else v
    P = s.P.subs(clean, table)
    Q = s.Q.subs(clean, table)
    new_assumes = []
    for a in s.assumptions:
        poly = a.poly.subs(clean, table)
        a2 = Assumption(poly, a.op)
        truth = a2.holds()
        if truth is False:
            raise AssumptionError(f"assumption violated: {a} under {bindings}")
        if truth is None:
            new_assumes.append(a2)
    new_params = tuple(v for v in table if v not in ("x", "y", "eps"))
    return PlaneSystem(P, Q, new_params, tuple(new_assumes))


def format_system(s: PlaneSystem) -> str:
    """Canonical text form; parsing it back reproduces the system exactly."""
    lines = []
    if s.params:
        lines.append("params: " + ", ".join(s.params))
    for a in s.assumptions:
        lines.append(f"assume: {a.poly} {a.op} 0")
    lines.append(f"xdot = {s.P}; ydot = {s.Q}")
    return "\n".join(lines)
