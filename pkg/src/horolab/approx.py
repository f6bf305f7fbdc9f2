"""Approximating a long horocycle segment by pieces of closed horocycles.

Let gamma* realize the fundamental period of p up to time T and write
gamma* g = [[a, b], [c, d]] with c > 0. The segment is an arc of the circle
whose top is l = gamma* g h(-d/c), at height R = 1/c^2 above alpha = a/c.
Segment time t corresponds to the arc parameter s(t) = t + d/c, and

    l h(s) = h(alpha - R s/(s^2+1)) a(R/(s^2+1)) k(-arccot s).

Away from the top (|s| large) the arc is nearly horizontal, so the piece
starting at s is shadowed by the horizontal, hence closed, horocycle through
g0 = h(alpha - R s/(s^2+1)) a(R/(s^2+1)), whose period is (s^2+1)/R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from horolab import numerics
from horolab.errors import DegeneratePeriodic, DomainError
from horolab.modular import (
    SurfacePoint,
    fundamental_period,
    r_parameter,
    reduce_element,
    surface_distance,
)
from horolab.psl2 import GroupElement, a, group_mul, h, horocycle_flow, iwasawa, k

# a horizontal bottom row (c ~ 0) means the segment lies on a closed horocycle
DEGENERATE_TOL = 1e-13


@dataclass(frozen=True)
class PeakData:
    gamma_star: GroupElement
    alpha: float
    R_peak: float
    s_offset: float  # d/c, so that s(t) = t + s_offset
    c: float
    d: float
    s0: float
    yT: float


class Interval(NamedTuple):
    lo: float
    hi: float
    kind: str  # "core" or "eta"

    @property
    def length(self) -> float:
        return max(0.0, self.hi - self.lo)

    def __contains__(self, t) -> bool:
        return self.lo <= t <= self.hi


@dataclass(frozen=True)
class ApproximantReport:
    xi: SurfacePoint
    period: float
    x0: float
    y0: float
    t0: float
    K: float
    delta: float
    measured_max_dist: float
    excluded: tuple[Interval, ...]
    eta: Optional[float] = None
    inside_exceptional: bool = False
    degenerate: bool = False
    yT: float = math.nan
    r: float = math.nan
    lift: Optional[GroupElement] = None  # integer gamma with gamma g h(t0+t) ~ g0 h(t)


def _ext_gcd(x: int, y: int) -> tuple[int, int, int]:
    if y == 0:
        return (abs(x), (1 if x >= 0 else -1), 0)
    g, s, t = _ext_gcd(y, x % y)
    return g, t, s - (x // y) * t


def completing_matrix(m: int, n: int) -> GroupElement:
    """An integer matrix in SL2(Z) with bottom row (m, n)."""
    g, s, t = _ext_gcd(n, m)  # s n + t m = 1
    if g != 1:
        raise DomainError(f"({m}, {n}) is not primitive")
    return GroupElement(float(s), float(-t), float(m), float(n))


def _integer_times(gm: GroupElement, g: GroupElement) -> GroupElement:
    return GroupElement(
        numerics.dot2(gm.a, g.a, gm.b, g.c),
        numerics.dot2(gm.a, g.b, gm.b, g.d),
        numerics.dot2(gm.c, g.a, gm.d, g.c),
        numerics.dot2(gm.c, g.b, gm.d, g.d),
    )


def peak(p: SurfacePoint, T: float) -> PeakData:
    """Peak parametrization of the segment p h([0, T]) in the maximizing frame."""
    if T < 0:
        raise DomainError("T must be >= 0")
    fp = fundamental_period(p, T)
    gstar = completing_matrix(*fp.witness)
    top = _integer_times(gstar, p.raw)
    c, d = top.c, top.d
    if c <= DEGENERATE_TOL * max(1.0, abs(d)):
        raise DegeneratePeriodic("segment lies on a closed horocycle", period=d * d)
    s_off = d / c
    R = 1.0 / (c * c)
    alpha = top.a / c
    s_start, s_end = s_off, s_off + T
    s0 = s_end if abs(s_end) > abs(s_start) else s_start
    return PeakData(gstar, alpha, R, s_off, c, d, s0, fp.yT)


def peak_point(pk: PeakData, s: float) -> GroupElement:
    """l h(s) from the closed-form Iwasawa factorization."""
    w = s * s + 1.0
    return group_mul(group_mul(h(pk.alpha - pk.R_peak * s / w), a(pk.R_peak / w)), k(-math.atan2(1.0, s)))


def exceptional_interval(
    p: SurfacePoint,
    T: float,
    delta: float,
    K: float,
    eta: Optional[float] = None,
    pk: Optional[PeakData] = None,
) -> tuple[Interval, ...]:
    """Times t0 in [0, T] where the closed-horocycle approximation is not claimed.

    Core part: |d/c + t| <= K^2 / (2 delta), total length <= K^2 / delta.
    With eta: additionally |d/c + t| <= eta T, which forces the period of the
    approximant to be at least of order eta^2 r.
    """
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    if not 0 < K <= T:
        raise DomainError("need 0 < K <= T")
    if eta is not None and not eta > 0:
        raise DomainError("eta must be positive")
    if pk is None:
        try:
            pk = peak(p, T)
        except DegeneratePeriodic:
            return ()
    centre = -pk.s_offset
    out = []
    radii = [("core", K * K / (2.0 * delta))]
    if eta is not None:
        radii.append(("eta", eta * T))
    for kind, rad in radii:
        lo, hi = max(0.0, centre - rad), min(T, centre + rad)
        while hi - lo > 2.0 * rad:  # keep the length bound exact under rounding
            hi = math.nextafter(hi, -math.inf)
        if lo <= hi:
            out.append(Interval(lo, hi, kind))
    return tuple(out)


def approximant(
    p: SurfacePoint,
    T: float,
    t0: float,
    K: float,
    delta: float = 0.1,
    eta: Optional[float] = None,
    samples: int = 101,
) -> ApproximantReport:
    """Closed horocycle shadowing p h(t0 + t), 0 <= t <= K."""
    if not 0 <= t0 <= T:
        raise DomainError(f"t0={t0} outside [0, T]")
    r = r_parameter(p, T) if T >= 3 else math.nan
    try:
        pk = peak(p, T)
    except DegeneratePeriodic as exc:
        g0 = horocycle_flow(p.raw, t0)
        fp = fundamental_period(p, T)
        gstar = completing_matrix(*fp.witness)
        coords = iwasawa(_integer_times(gstar, g0))
        rep = ApproximantReport(
            xi=reduce_element(g0),
            period=exc.period,
            x0=coords.x,
            y0=coords.y,
            t0=t0,
            K=K,
            delta=delta,
            measured_max_dist=0.0,
            excluded=(),
            eta=eta,
            degenerate=True,
            yT=fp.yT,
            r=r,
            lift=None,
        )
        return _with_measure(rep, p, samples)

    s = t0 + pk.s_offset
    w = s * s + 1.0
    y0 = pk.R_peak / w
    x0 = pk.alpha - pk.R_peak * s / w
    g0 = group_mul(h(x0), a(y0))
    excluded = exceptional_interval(p, T, delta, K, eta, pk)
    rep = ApproximantReport(
        xi=SurfacePoint(reduce_element(g0).rep, reduce_element(g0).reducer, g0),
        period=w / pk.R_peak,
        x0=x0,
        y0=y0,
        t0=t0,
        K=K,
        delta=delta,
        measured_max_dist=math.nan,
        excluded=excluded,
        eta=eta,
        inside_exceptional=any(t0 in iv for iv in excluded),
        yT=pk.yT,
        r=r,
        lift=pk.gamma_star,
    )
    return _with_measure(rep, p, samples)


def _with_measure(rep: ApproximantReport, p: SurfacePoint, samples: int) -> ApproximantReport:
    return replace(rep, measured_max_dist=verify_approximation(p, rep.t0, rep.K, rep, samples))


def verify_approximation(p: SurfacePoint, t0: float, K: float, rep: ApproximantReport, samples: int = 101) -> float:
    """max over an equispaced grid of d_X(p h(t0 + t), xi h(t)), 0 <= t <= K."""
    if samples < 2:
        raise DomainError("need at least 2 samples")
    worst = 0.0
    for t in np.linspace(0.0, K, samples).tolist():
        g1 = horocycle_flow(p.raw, t0 + t)
        g2 = horocycle_flow(rep.xi.raw, t)
        lifts = []
        if rep.lift is not None:
            lifts.append((_integer_times(rep.lift, g1), g2))
        dist = surface_distance(reduce_element(g1), reduce_element(g2), lifts)
        worst = max(worst, dist)
    return worst


def periodicity_defect(rep: ApproximantReport) -> float:
    """d_X(xi h(period), xi); zero up to rounding for a genuine closed horocycle."""
    g = rep.xi.raw
    moved = horocycle_flow(g, rep.period)
    return surface_distance(reduce_element(moved), reduce_element(g))
