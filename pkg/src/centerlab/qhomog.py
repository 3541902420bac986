"""Homogeneous and quasi-homogeneous center machinery.

A system is (p,q)-quasi-homogeneous of weight degree m when P and Q are
(p,q)-quasi-homogeneous of weight degrees p-1+m and q-1+m.  For coprime P, Q
the centers are characterized by (i) the weighted form p*x*Q - q*y*P having
no real factors and (ii) the vanishing of the integral of F/G over one period
of the generalized trigonometric functions Cs, Sn, which solve

    z' = -w^(2p-1),  w' = z^(2q-1),  z(0) = p^(-1/(2q)),  w(0) = 0

and satisfy p*Cs^(2q) + q*Sn^(2p) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gcd
from typing import List, Optional, Tuple

from .mpoly import MPoly, Rat, poly_gcd
from .numeric import Trajectory, compile_system, integrate_adaptive, _refine_crossing
from .realroots import strict_sign_on_nonneg_axis, trim
from .systems import PlaneSystem


@dataclass(frozen=True)
class QHSignature:
    p: int
    q: int
    m: int

    def __str__(self) -> str:
        return f"({self.p},{self.q})-quasi-homogeneous of weight degree {self.m}"


def _weight_degree(poly: MPoly, p: int, q: int) -> Optional[int]:
    """The common (p,q)-weight of all monomials, or None if mixed."""
    if poly.is_zero:
        return None
    ix = poly.vars.index("x")
    iy = poly.vars.index("y")
    weights = {p * e[ix] + q * e[iy] for e in poly.terms}
    return weights.pop() if len(weights) == 1 else -1


def detect_quasi_homogeneity(s: PlaneSystem, search_bound: int = 10) -> List[QHSignature]:
    """All coprime (p, q) up to the bound making the system quasi-homogeneous."""
    if s.P.is_zero and s.Q.is_zero:
        raise ValueError("zero vector field")
    out = []
    for p in range(1, search_bound + 1):
        for q in range(1, search_bound + 1):
            if gcd(p, q) != 1:
                continue
            wp = _weight_degree(s.P, p, q)
            wq = _weight_degree(s.Q, p, q)
            if wp == -1 or wq == -1:
                continue
            m_candidates = set()
            if wp is not None:
                m_candidates.add(wp - (p - 1))
            if wq is not None:
                m_candidates.add(wq - (q - 1))
            if len(m_candidates) != 1:
                continue
            m = m_candidates.pop()
            if m >= 0:
                out.append(QHSignature(p, q, m))
    return out


# -- generalized trigonometric functions ---------------------------------------


def pq_period(p: int, q: int) -> float:
    """Period of the (p,q)-trigonometric functions via the Gamma-function
    formula."""
    a = 1 / (2 * p)
    b = 1 / (2 * q)
    return (2 * p ** (-b) * q ** (-a)
            * math.gamma(a) * math.gamma(b) / math.gamma(a + b))


@dataclass
class PQCircle:
    """One period of (Cs, Sn) with dense output and the identity residual."""

    p: int
    q: int
    tau: float
    trajectory: Trajectory
    tolerance: float
    samples: List[Tuple[float, float, float]] = field(default_factory=list)

    def cs_sn(self, theta: float) -> Tuple[float, float]:
        th = theta % self.tau
        z, w = self.trajectory(th)
        return float(z), float(w)

    def identity_error(self, theta: float) -> float:
        z, w = self.cs_sn(theta)
        return abs(self.p * z ** (2 * self.q) + self.q * w ** (2 * self.p) - 1.0)

    def max_identity_error(self) -> float:
        return max(self.identity_error(th) for th, _, _ in self.samples) if self.samples else 0.0


def _pq_rhs(p: int, q: int):
    e1 = 2 * p - 1
    e2 = 2 * q - 1

    def f(z, w):
        return (-(w ** e1), z ** e2)

    return f


def pq_circle(p: int, q: int, rel_tol: float = 1e-12, abs_tol: float = 1e-14) -> PQCircle:
    """Integrate the defining system over one full period (the period itself
    is located by the return of (Cs, Sn) to the initial point)."""
    f = _pq_rhs(p, q)
    z0 = p ** (-1 / (2 * q))
    tau_formula = pq_period(p, q)
    hit = {}

    def callback(seg, y_new):
        # return of w to 0 from below with z > 0, past half a period
        t_new = seg.t0 + seg.h
        if t_new < 0.5 * tau_formula:
            return False
        if seg.y0[1] < 0 <= y_new[1] and y_new[0] > 0:
            tc, yc = _refine_crossing(seg, lambda st: st[1])
            hit["t"] = tc
            return True
        return False

    traj = integrate_adaptive(f, (z0, 0.0), (0.0, 2.5 * tau_formula),
                              rel_tol=rel_tol, abs_tol=abs_tol, step_callback=callback)
    tau = hit.get("t", tau_formula)
    samples = [(t, float(y[0]), float(y[1])) for t, y in zip(traj.t, traj.y)]
    return PQCircle(p, q, tau, traj, tolerance=max(1e-10, 100 * rel_tol), samples=samples)


def pq_trig(p: int, q: int, theta: float, circle: Optional[PQCircle] = None) -> Tuple[float, float]:
    """(Cs(theta), Sn(theta)) by adaptive integration from the defining
    initial condition."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    if circle is None:
        circle = pq_circle(p, q)
    return circle.cs_sn(theta)


def measured_period(p: int, q: int, rel_tol: float = 1e-12) -> float:
    """Return time of (Cs, Sn) to the initial point (oracle for the Gamma
    formula)."""
    return pq_circle(p, q, rel_tol=rel_tol).tau


# -- center conditions ----------------------------------------------------------


@dataclass
class ConditionIVerdict:
    holds: bool
    sign: Optional[int] = None       # sign of G along the circle when it holds
    exact: bool = False              # certified by exact even-form analysis
    witness: Optional[Tuple[float, float]] = None  # theta window of a sign change
    detail: str = ""


def _weighted_form(s: PlaneSystem, sig: QHSignature) -> MPoly:
    table = s.vars
    x = MPoly.variable("x", table)
    y = MPoly.variable("y", table)
    return x * s.Q * sig.p - y * s.P * sig.q


def condition_i_no_real_factors(s: PlaneSystem, sig: QHSignature,
                                grid: int = 2048) -> ConditionIVerdict:
    """Decide whether the weighted form p*x*Q - q*y*P vanishes anywhere off
    the origin (equivalently whether it has a real factor).

    Even-even forms are decided exactly through the substitution
    (x^2, y^2) -> (s, t); otherwise the form is evaluated along the
    (p,q)-circle on a grid with a derivative-bound certificate.
    """
    if not s.is_numeric():
        raise ValueError("specialize parameters first")
    g = poly_gcd(s.P, s.Q)
    if not g.is_constant:
        raise ValueError(f"P and Q must be coprime; common factor {g}")
    W = _weighted_form(s, sig)
    if W.is_zero:
        return ConditionIVerdict(False, detail="weighted form is identically zero")
    ix = W.vars.index("x")
    iy = W.vars.index("y")
    if all(e[ix] % 2 == 0 and e[iy] % 2 == 0 for e in W.terms):
        # W(x,y) = w(x^2, y^2): no real zero off the origin iff w keeps one
        # strict sign on the closed positive quadrant minus the origin.
        # Weighted homogeneity reduces that to w(1, t) on t >= 0 plus the
        # s = 0 boundary slice.
        wx: dict = {}
        for e, c in W.terms.items():
            key = (e[ix] // 2, e[iy] // 2)
            wx[key] = wx.get(key, Rat(0)) + c
        poly_t: dict = {}
        for (i, j), c in wx.items():
            poly_t[j] = poly_t.get(j, Rat(0)) + c
        dense = trim([poly_t.get(k, Rat(0)) for k in range(max(poly_t) + 1)])
        sgn = strict_sign_on_nonneg_axis(dense)
        if sgn is None:
            return ConditionIVerdict(False, exact=True,
                                     detail="w(1,t) vanishes for some t >= 0")
        pure = [(j, c) for (i, j), c in wx.items() if i == 0]
        if not pure:
            return ConditionIVerdict(False, exact=True,
                                     detail="x^2 divides the weighted form")
        (_, c0) = pure[0]
        if (c0 > 0) != (sgn > 0):
            return ConditionIVerdict(False, exact=True, detail="sign change across x = 0")
        return ConditionIVerdict(True, sign=sgn, exact=True,
                                 detail="even form, certified by Sturm count")

    # grid + derivative bound along the (p,q)-circle
    circle = pq_circle(sig.p, sig.q)
    p_, q_ = sig.p, sig.q
    fPQ = compile_system(s)

    def G(th):
        z, w = circle.cs_sn(th)
        P, Q = fPQ(z, w)
        return p_ * z * Q - q_ * w * P

    zmax = sig.p ** (-1 / (2 * sig.q))
    wmax = sig.q ** (-1 / (2 * sig.p))
    Wx = W.diff("x")
    Wy = W.diff("y")
    bound = 0.0
    for poly, extra in ((Wx, wmax ** (2 * sig.p - 1)), (Wy, zmax ** (2 * sig.q - 1))):
        acc = 0.0
        for e, c in poly.terms.items():
            acc += abs(float(c)) * zmax ** e[ix] * wmax ** e[iy]
        bound += acc * extra
    h = circle.tau / grid
    values = [G(k * h) for k in range(grid)]
    mn = min(abs(v) for v in values)
    if mn > bound * h / 2:
        return ConditionIVerdict(True, sign=1 if values[0] > 0 else -1, exact=False,
                                 detail=f"grid of {grid} nodes with Lipschitz margin")
    k = min(range(grid), key=lambda i: abs(values[i]))
    return ConditionIVerdict(False, exact=False,
                             witness=(k * h - h / 2, k * h + h / 2),
                             detail="sign change or near-zero on the circle")


@dataclass
class ConditionIIResult:
    value: float
    error: float
    period: float


def condition_ii_integral(s: PlaneSystem, sig: QHSignature,
                          rel_tol: float = 1e-12) -> ConditionIIResult:
    """Integral of F/G over one period of the (p,q)-trigonometric functions.

    F = Cs^(2q-1) P(Cs,Sn) + Sn^(2p-1) Q(Cs,Sn) and
    G = p Cs Q(Cs,Sn) - q Sn P(Cs,Sn); condition (i) must hold first."""
    verdict = condition_i_no_real_factors(s, sig)
    if not verdict.holds:
        raise ValueError(f"condition (i) fails: {verdict.detail}")
    fPQ = compile_system(s)
    p, q = sig.p, sig.q
    e1 = 2 * p - 1
    e2 = 2 * q - 1
    z0 = p ** (-1 / (2 * q))

    def rhs(z, w, I):
        P, Q = fPQ(z, w)
        F = z ** e2 * P + w ** e1 * Q
        G = p * z * Q - q * w * P
        return (-(w ** e1), z ** e2, F / G)

    def run(tol):
        tau_formula = pq_period(p, q)
        hit = {}

        def callback(seg, y_new):
            if seg.t0 + seg.h < 0.5 * tau_formula:
                return False
            if seg.y0[1] < 0 <= y_new[1] and y_new[0] > 0:
                tc, yc = _refine_crossing(seg, lambda st: st[1])
                hit["t"] = tc
                hit["I"] = yc[2]
                return True
            return False

        traj = integrate_adaptive(rhs, (z0, 0.0, 0.0), (0.0, 2.5 * tau_formula),
                                  rel_tol=tol, abs_tol=tol * 1e-2,
                                  step_callback=callback)
        if "I" not in hit:
            raise RuntimeError("integration did not close the period")
        return hit["t"], hit["I"]

    tau1, i1 = run(rel_tol)
    tau2, i2 = run(min(1e-4, rel_tol * 100))
    err = abs(i1 - i2) + abs(i1) * rel_tol * 10 + 1e-15
    return ConditionIIResult(i1, err, tau1)


def classify_qh_center(s: PlaneSystem, sig: QHSignature,
                       zero_tol: float = 1e-8) -> Tuple[str, dict]:
    """center / focus / undecided via conditions (i) and (ii).

    The verdict is numeric: the integral is declared zero when its magnitude
    is below max(zero_tol, 1000 * quadrature error estimate)."""
    info: dict = {}
    verdict_i = condition_i_no_real_factors(s, sig)
    info["condition_i"] = verdict_i
    if not verdict_i.holds:
        return "undecided", info
    res = condition_ii_integral(s, sig)
    info["condition_ii"] = res
    threshold = max(zero_tol, 1e3 * res.error)
    info["threshold"] = threshold
    if abs(res.value) <= threshold:
        return "center", info
    return "focus", info
