"""Gamma = PSL2(Z) specific geometry: reduction, heights, fundamental period, dist, r.

Everything reduces to the row lattice of g: for an integer pair (m, n) the
vector (m, n) g is the bottom row of some gamma g, and Im(gamma g . i) is
1 / |(m, n) g|^2. Hence the invariant height is 1 / lambda_1^2 of that lattice
and the fundamental period is 1 / lambda_1^2 under the norm

    N(v)^2 = max(|v g|^2, |v g h(T)|^2).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from horolab import numerics
from horolab.errors import DomainError, NumericError
from horolab.psl2 import (
    IDENTITY,
    GroupElement,
    geodesic_flow,
    group_inv,
    group_mul,
    h,
    metric,
    same_element,
)

MAX_STEPS = 10_000
TIE_TOL = 1e-12
T_MAX = 1e12
CUSP_EPS = 1.0


@dataclass(frozen=True)
class Cusp:
    """Cusp data (sigma_i, gamma_i) with sigma gamma sigma^-1 = h(1)."""

    sigma: GroupElement
    gamma: GroupElement


MODULAR_CUSPS = (Cusp(IDENTITY, h(1.0)),)


@dataclass(frozen=True)
class SurfacePoint:
    rep: GroupElement
    reducer: GroupElement
    raw: GroupElement


@dataclass(frozen=True)
class LatticeBasis:
    v1: tuple[float, float]
    v2: tuple[float, float]


@dataclass(frozen=True)
class PeriodData:
    yT: float
    witness: tuple[int, int]
    y0: float
    T: float


def _nrm2(v):
    return v[0] * v[0] + v[1] * v[1]


def _gauss(u, v, cu, cv):
    """Lagrange-Gauss reduction tracking integer coefficient rows cu, cv."""
    for _ in range(MAX_STEPS):
        if _nrm2(u) > _nrm2(v):
            u, v, cu, cv = v, u, cv, cu
        mu = round((u[0] * v[0] + u[1] * v[1]) / _nrm2(u))
        if mu == 0:
            return u, v, cu, cv
        v = (v[0] - mu * u[0], v[1] - mu * u[1])
        cv = (cv[0] - mu * cu[0], cv[1] - mu * cu[1])
    raise NumericError("Gauss reduction did not terminate")


def gauss_reduce(b: LatticeBasis) -> LatticeBasis:
    """Lagrange-Gauss reduced basis; v1 is a shortest nonzero lattice vector."""
    det = b.v1[0] * b.v2[1] - b.v1[1] * b.v2[0]
    scale = _nrm2(b.v1) + _nrm2(b.v2)
    if not scale > 0 or abs(det) <= 1e-14 * scale:
        raise DomainError("degenerate lattice basis")
    u, v, _, _ = _gauss(tuple(map(float, b.v1)), tuple(map(float, b.v2)), (1, 0), (0, 1))
    return LatticeBasis(u, v)


def _apply_integer(U, g: GroupElement) -> GroupElement:
    """U g for an integer matrix U given as ((p, q), (r, s)), compensated."""
    (p, q), (r, s) = U
    return GroupElement(
        numerics.dot2(float(p), g.a, float(q), g.c),
        numerics.dot2(float(p), g.b, float(q), g.d),
        numerics.dot2(float(r), g.a, float(s), g.c),
        numerics.dot2(float(r), g.b, float(s), g.d),
    )


def _re_im(g: GroupElement) -> tuple[float, float, float]:
    n = g.c * g.c + g.d * g.d
    return (g.a * g.c + g.b * g.d) / n, 1.0 / n, (g.a * g.a + g.b * g.b) / n


def reduce_element(g: GroupElement) -> SurfacePoint:
    """Representative of Gamma g whose base point lies in the standard domain.

    Boundary convention: Re in [-1/2, 1/2); on the unit circle Re >= 0,
    except the corner (-1 + i sqrt3)/2 which keeps Re = -1/2.
    """
    # start from the bottom row so that ties keep it (reduced input -> reducer id)
    u, v, cu, cv = _gauss((g.c, g.d), (g.a, g.b), (0, 1), (1, 0))
    # bottom row = shortest vector, orient so that det = +1
    sign = cv[0] * cu[1] - cv[1] * cu[0]
    top = cv if sign == 1 else (-cv[0], -cv[1])
    U = [list(top), list(cu)]
    rep = _apply_integer(U, g)
    x, _, _ = _re_im(rep)
    shift = math.floor(x + 0.5 + TIE_TOL)
    if shift:
        U[0] = [U[0][0] - shift * U[1][0], U[0][1] - shift * U[1][1]]
        rep = _apply_integer(U, g)
    x, _, z2 = _re_im(rep)
    if abs(z2 - 1.0) <= TIE_TOL and x < 0 and x > -0.5 + TIE_TOL:
        U = [[-U[1][0], -U[1][1]], U[0]]
        rep = _apply_integer(U, g)
    reducer = GroupElement(*map(float, (U[0][0], U[0][1], U[1][0], U[1][1])))
    return SurfacePoint(rep, reducer, g)


def reduce_point(z: complex) -> tuple[complex, GroupElement]:
    if not z.imag > 0:
        raise DomainError(f"{z} is not in the upper half plane")
    sy = math.sqrt(z.imag)
    p = reduce_element(GroupElement(sy, z.real / sy, 0.0, 1.0 / sy))
    x, y, _ = _re_im(p.rep)
    return complex(x, y), p.reducer


def point_from_element(g: GroupElement) -> SurfacePoint:
    return reduce_element(g)


def enumerate_lattice(rows, bound: float) -> np.ndarray:
    """All integer (m, n) != 0 with |m rows[0] + n rows[1]|^2 <= bound.

    `rows` is a 2 x k array whose rows span a rank-2 lattice in R^k. The
    basis is Gauss-reduced first so the coefficient box is tight; working
    with vectors rather than a Gram matrix keeps the reduced lengths accurate
    when the input rows are long.
    """
    rows = np.asarray(rows, dtype=np.float64)
    u, v = rows[0], rows[1]
    cu, cv = (1, 0), (0, 1)
    for _ in range(MAX_STEPS):
        if u @ u > v @ v:
            u, v, cu, cv = v, u, cv, cu
        mu = round(float(u @ v) / float(u @ u))
        if mu == 0:
            break
        v = v - mu * u
        cv = (cv[0] - mu * cu[0], cv[1] - mu * cu[1])
    else:
        raise NumericError("lattice reduction did not terminate")
    A, B, C = float(u @ u), float(u @ v), float(v @ v)
    D = C - B * B / A
    if not A > 0 or not D > 0:
        raise DomainError("degenerate lattice basis")
    slack = bound * (1 + 1e-9)
    ymax = math.floor(math.sqrt(max(slack, 0.0) / D))
    out = []
    for y in range(-ymax, ymax + 1):
        rem = slack - D * y * y
        if rem < 0:
            continue
        w = math.sqrt(rem / A)
        c = -B * y / A
        for x in range(math.ceil(c - w), math.floor(c + w) + 1):
            if x == 0 and y == 0:
                continue
            out.append((x * cu[0] + y * cv[0], x * cu[1] + y * cv[1]))
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(out, dtype=np.int64)


def lattice_minimum(rows) -> float:
    """Squared length of a shortest nonzero vector of the lattice spanned by `rows`."""
    rows = np.asarray(rows, dtype=np.float64)
    u, v = rows[0], rows[1]
    for _ in range(MAX_STEPS):
        if u @ u > v @ v:
            u, v = v, u
        mu = round(float(u @ v) / float(u @ u))
        if mu == 0:
            return float(u @ u)
        v = v - mu * u
    raise NumericError("lattice reduction did not terminate")


def _canonical_pairs(v: np.ndarray) -> np.ndarray:
    flip = (v[:, 0] < 0) | ((v[:, 0] == 0) & (v[:, 1] < 0))
    v = v.copy()
    v[flip] *= -1
    return v


def _primitive(v: np.ndarray) -> np.ndarray:
    return np.gcd(v[:, 0], v[:, 1]) == 1


def _rows(g: GroupElement) -> np.ndarray:
    return np.array([[g.a, g.b], [g.c, g.d]])


def _row_images(v: np.ndarray, g: GroupElement, T: float = 0.0):
    """Components of (m, n) g and the second component of (m, n) g h(T)."""
    m = v[:, 0].astype(np.float64)
    n = v[:, 1].astype(np.float64)
    C = numerics.dot2(m, g.a, n, g.c)
    D = numerics.dot2(m, g.b, n, g.d)
    if T == 0:
        return C, D, D
    bh, bl = numerics.affine2(g.a, T, g.b)
    dh, dl = numerics.affine2(g.c, T, g.d)
    DT = numerics.dot2_pairs(m, bh, bl, n, dh, dl)
    return C, D, DT


def short_primitive_vectors(g: GroupElement, count: int):
    """The `count` shortest primitive vectors (m, n) g, sorted by norm.

    Each pair is listed once (sign normalized: m > 0, or m == 0 and n > 0);
    ties are broken lexicographically in (m, n).
    """
    if not 1 <= count <= 1000:
        raise DomainError("count must be in 1..1000")
    rows = _rows(g)
    bound = lattice_minimum(rows) * (1 + 1e-9)
    while True:
        v = enumerate_lattice(rows, bound)
        v = np.unique(_canonical_pairs(v[_primitive(v)]), axis=0) if len(v) else v
        if len(v) >= count:
            break
        bound *= 2.0
    C, D, _ = _row_images(v, g)
    norms = np.hypot(C, D)
    order = np.lexsort((v[:, 1], v[:, 0], norms))
    # the enumeration bound guarantees completeness up to `bound`
    out = []
    for i in order[:count]:
        out.append(((int(v[i, 0]), int(v[i, 1])), (float(C[i]), float(D[i]))))
    return out


def invariant_height(p: SurfacePoint) -> float:
    """sup over gamma of Im(gamma g . i) = 1 / (shortest row-lattice vector)^2."""
    g = p.raw
    u = gauss_reduce(LatticeBasis((g.a, g.b), (g.c, g.d))).v1
    return 1.0 / _nrm2(u)


def fundamental_period(p: SurfacePoint, T: float, cusps: Sequence[Cusp] = MODULAR_CUSPS) -> PeriodData:
    """y_T = max over primitive (m, n) of min(Im of gamma g, Im of gamma g h(T)).

    Candidates are enumerated from the combined form |vg|^2 + |vgh(T)|^2,
    which bounds twice the objective; the bound starts from the best of a
    few reduced-basis vectors, so the search is certified complete.
    """
    if T < 0:
        raise DomainError(f"T must be >= 0, got {T}")
    if T > T_MAX:
        raise DomainError(f"T={T} exceeds the double-precision cap {T_MAX}")
    if any(not _is_identity(c.sigma) for c in cusps):
        raise DomainError("only the cusp at infinity with sigma = id is supported")
    g = p.raw
    bh, bl = numerics.affine2(g.a, T, g.b)
    dh, dl = numerics.affine2(g.c, T, g.d)
    both = np.array([[g.a, g.b, g.a, bh + bl], [g.c, g.d, g.c, dh + dl]])
    seeds = np.concatenate(
        [
            enumerate_lattice(r, lattice_minimum(r) * (1 + 1e-9))
            for r in (both[:, :2], both[:, 2:], both)
        ]
    )
    C, D, DT = _row_images(seeds, g, T)
    obj = np.maximum(C * C + D * D, C * C + DT * DT)
    best = float(obj.min())

    # |v g|^2 + |v g h(T)|^2 <= 2 N(v)^2, so every improving v is enumerated here
    cand = enumerate_lattice(both, 2.0 * best)
    cand = _canonical_pairs(cand[_primitive(cand)])
    C, D, DT = _row_images(cand, g, T)
    obj = np.maximum(C * C + D * D, C * C + DT * DT)
    top = obj.min()
    near = np.flatnonzero(obj <= top * (1 + TIE_TOL))
    pick = min(near, key=lambda i: (int(cand[i, 0]), int(cand[i, 1])))
    witness = (int(cand[pick, 0]), int(cand[pick, 1]))
    y0 = invariant_height(p)
    return PeriodData(yT=1.0 / float(top), witness=witness, y0=y0, T=float(T))


def _is_identity(g: GroupElement) -> bool:
    return g.entries() == IDENTITY.entries()


@lru_cache(maxsize=4)
def small_gamma_elements(bound: int = 2) -> tuple[GroupElement, ...]:
    """All elements of PSL2(Z) with entries in [-bound, bound]."""
    out = {}
    rng = range(-bound, bound + 1)
    for a_, b_, c_, d_ in itertools.product(rng, repeat=4):
        if a_ * d_ - b_ * c_ == 1:
            g = GroupElement(a_, b_, c_, d_)
            out[g.entries()] = g
    return tuple(out[key] for key in sorted(out))


def surface_distance(
    p1: SurfacePoint, p2: SurfacePoint, lifts: Iterable[tuple[GroupElement, GroupElement]] = ()
) -> float:
    """Upper bound for d_X(p1, p2) that is exact for nearby points.

    Minimizes the metric between the reduced representatives over a
    neighborhood of gamma's; `lifts` adds known lift pairs (g1, g2) of the
    two points, for which d(g1, g2) is also an upper bound.
    """
    best = min(metric(p1.rep, group_mul(gm, p2.rep)) for gm in small_gamma_elements())
    for g1, g2 in lifts:
        best = min(best, metric(g1, g2))
    return best


def dist_to_base(p: SurfacePoint) -> float:
    """d_X(p, Gamma) for the base point Gamma * id."""
    return min(metric(p.rep, gm) for gm in small_gamma_elements())


def exercise_ratio(C: float, D: float, T: float) -> float:
    """min(1/(C^2+D^2), 1/(C^2+(TC+D)^2)) / min(1/(TC)^2, 1/D^2), zero entries as limits."""
    if C == 0 and D == 0:
        raise DomainError("(C, D) must be nonzero")
    DT = numerics.affine2(C, T, D)
    DT = DT[0] + DT[1]
    num = 1.0 / max(C * C + D * D, C * C + DT * DT)
    den = 1.0 / max((T * C) ** 2, D * D)
    return num / den


def r_parameter(p: SurfacePoint, T: float) -> float:
    """r = T exp(-dist(g_{log T}(p)))."""
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    if T < 3:
        warnings.warn(f"r-parameter is only meaningful for T >= 3 (got {T})", stacklevel=2)
    q = reduce_element(geodesic_flow(p.raw, math.log(T)))
    return T * math.exp(-dist_to_base(q))


def closed_period(p: SurfacePoint, eps: float = CUSP_EPS):
    """Period 1/y0 of the closed horocycle over the base point, if p is in the cusp region."""
    y0 = invariant_height(p)
    if y0 * eps >= 1.0 - 1e-12:
        return 1.0 / y0
    return None


# ---- batched reduction for orbit sampling ---------------------------------


def reduce_rows_batch(a, b, c, d, blo=None, dlo=None):
    """Vectorized reduce_element; returns the representatives' entries (a, b, c, d).

    blo, dlo are optional low-order parts of b and d (b = b + blo exactly);
    they enter the final integer transform, which is where large reducing
    coefficients would otherwise amplify their loss.
    """
    a, b, c, d = (np.asarray(x, dtype=np.float64) for x in (a, b, c, d))
    blo = np.zeros_like(b) if blo is None else np.asarray(blo, dtype=np.float64)
    dlo = np.zeros_like(d) if dlo is None else np.asarray(dlo, dtype=np.float64)
    n = a.shape[0]
    ux, uy, vx, vy = c.copy(), d.copy(), a.copy(), b.copy()
    cu = np.stack([np.zeros(n), np.ones(n)])
    cv = np.stack([np.ones(n), np.zeros(n)])
    active = np.arange(n)
    for _ in range(MAX_STEPS):
        if active.size == 0:
            break
        i = active
        nu = ux[i] ** 2 + uy[i] ** 2
        nv = vx[i] ** 2 + vy[i] ** 2
        sw = i[nu > nv]
        if sw.size:
            ux[sw], vx[sw] = vx[sw], ux[sw].copy()
            uy[sw], vy[sw] = vy[sw], uy[sw].copy()
            cu[:, sw], cv[:, sw] = cv[:, sw], cu[:, sw].copy()
        mu = np.rint((ux[i] * vx[i] + uy[i] * vy[i]) / (ux[i] ** 2 + uy[i] ** 2))
        go = mu != 0
        i, mu = i[go], mu[go]
        vx[i] -= mu * ux[i]
        vy[i] -= mu * uy[i]
        cv[:, i] -= mu * cu[:, i]
        active = i
    else:
        raise NumericError("batched Gauss reduction did not terminate")

    sign = cv[0] * cu[1] - cv[1] * cu[0]
    top = cv * sign
    U = [top[0], top[1], cu[0], cu[1]]

    def apply(U):
        return (
            numerics.dot2(U[0], a, U[1], c),
            numerics.dot2(U[0], b, U[1], d) + (U[0] * blo + U[1] * dlo),
            numerics.dot2(U[2], a, U[3], c),
            numerics.dot2(U[2], b, U[3], d) + (U[2] * blo + U[3] * dlo),
        )

    ra, rb, rc, rd = apply(U)
    nrm = rc * rc + rd * rd
    x = (ra * rc + rb * rd) / nrm
    shift = np.floor(x + 0.5 + TIE_TOL)
    if np.any(shift):
        U = [U[0] - shift * U[2], U[1] - shift * U[3], U[2], U[3]]
        ra, rb, rc, rd = apply(U)
        nrm = rc * rc + rd * rd
        x = (ra * rc + rb * rd) / nrm
    z2 = (ra * ra + rb * rb) / nrm
    flip = (np.abs(z2 - 1.0) <= TIE_TOL) & (x < 0) & (x > -0.5 + TIE_TOL)
    if np.any(flip):
        ra, rb, rc, rd = (
            np.where(flip, -rc, ra),
            np.where(flip, -rd, rb),
            np.where(flip, ra, rc),
            np.where(flip, rb, rd),
        )
    neg = (rc < 0) | ((rc == 0) & (ra < 0))
    s = np.where(neg, -1.0, 1.0)
    return ra * s, rb * s, rc * s, rd * s


def iwasawa_batch(a, b, c, d):
    n = c * c + d * d
    x = (a * c + b * d) / n
    theta = np.arctan2(-c, d)
    theta = np.where(theta >= np.pi / 2, theta - np.pi, theta)
    theta = np.where(theta < -np.pi / 2, theta + np.pi, theta)
    return x, 1.0 / n, theta


def orbit_coords(g: GroupElement, times) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Iwasawa coordinates (x, y, theta) of the reduced representatives of g h(t)."""
    t = np.asarray(times, dtype=np.float64)
    bh, bl = numerics.affine2(g.a, t, g.b)
    dh, dl = numerics.affine2(g.c, t, g.d)
    a = np.full_like(t, g.a)
    c = np.full_like(t, g.c)
    return iwasawa_batch(*reduce_rows_batch(a, bh, c, dh, bl, dl))


def inverse_reducer_check(p: SurfacePoint, tol: float = 1e-9) -> bool:
    """rep == reducer . raw within tol (used by tests and the CLI self-check)."""
    return same_element(p.rep, group_mul(p.reducer, p.raw), tol)


__all__ = [
    "Cusp",
    "LatticeBasis",
    "MODULAR_CUSPS",
    "PeriodData",
    "SurfacePoint",
    "closed_period",
    "exercise_ratio",
    "dist_to_base",
    "enumerate_lattice",
    "lattice_minimum",
    "fundamental_period",
    "gauss_reduce",
    "group_inv",
    "invariant_height",
    "orbit_coords",
    "r_parameter",
    "reduce_element",
    "reduce_point",
    "reduce_rows_batch",
    "short_primitive_vectors",
    "small_gamma_elements",
    "surface_distance",
]
