"""Weighted averages of a test function along horocycle orbits.

Orbit points xi h(t) are generated directly from t (no incremental stepping),
with a compensated affine update and a batched reduction, so a point's
coordinates do not depend on how the time range is chunked. Sums are combined
with math.fsum, which is correctly rounded and therefore independent of the
chunking and of the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from horolab.errors import CapacityError, DomainError
from horolab.modular import SurfacePoint, orbit_coords
from horolab.sieve import SieveTable, SieveWeightParams, nu_array, prime_weight_array
from horolab.testfun import TestFunction

CHUNK = 1 << 17
WEIGHT_KINDS = ("uniform", "nu", "prime")


def _values(xi: SurfacePoint, f: TestFunction, times: np.ndarray) -> np.ndarray:
    return f.eval_coords(*orbit_coords(xi.raw, times))


def weighted_orbit_total(
    xi: SurfacePoint, f: TestFunction, times: np.ndarray, weights: Optional[np.ndarray] = None, threads: int = 1
) -> float:
    """sum_i f(xi h(times[i])) weights[i], correctly rounded."""
    times = np.asarray(times, dtype=np.float64)
    starts = range(0, times.size, CHUNK)

    def job(i):
        v = _values(xi, f, times[i : i + CHUNK])
        if weights is not None:
            v = v * weights[i : i + CHUNK]
        return v.tolist()

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(job, starts))
    else:
        parts = [job(i) for i in starts]
    return math.fsum(x for part in parts for x in part)


def orbit_values(xi: SurfacePoint, f: TestFunction, times) -> np.ndarray:
    return _values(xi, f, np.asarray(times, dtype=np.float64))


def orbit_sum(
    xi: SurfacePoint,
    T: float,
    s: float,
    weight: str,
    f: TestFunction,
    sieve: Optional[SieveTable] = None,
    params: Optional[SieveWeightParams] = None,
    threads: int = 1,
) -> float:
    """Normalized weighted orbit average.

    uniform: (s/T) sum_{1 <= j <= T/s} f(xi h(s j))
    nu:      (1/T) sum_{n <= T} f(xi h(n)) nu(n)
    prime:   (1/pi(T)) sum_{p <= T} f(xi h(p))
    """
    if not T >= 1:
        raise DomainError(f"T must be >= 1, got {T}")
    if weight == "uniform":
        if not s >= 1:
            raise DomainError(f"step s must be >= 1, got {s}")
        J = math.floor(T / s)
        times = s * np.arange(1, J + 1, dtype=np.float64)
        return weighted_orbit_total(xi, f, times, threads=threads) * s / T
    if weight not in WEIGHT_KINDS:
        raise DomainError(f"unknown weight {weight!r}")
    if sieve is None:
        raise DomainError(f"weight {weight!r} needs a sieve table")
    M = math.floor(T)
    if M > sieve.limit:
        raise CapacityError(f"T={T} exceeds sieve capacity {sieve.limit}")
    if weight == "nu":
        if params is None:
            raise DomainError("nu weight needs SieveWeightParams")
        w = nu_array(M, params, sieve)[1:]
        nz = np.flatnonzero(w)
        return weighted_orbit_total(xi, f, (nz + 1).astype(np.float64), w[nz], threads) / T
    ps = sieve.primes[sieve.primes <= M].astype(np.float64)
    if ps.size == 0:
        raise DomainError(f"no primes up to {T}")
    return weighted_orbit_total(xi, f, ps, threads=threads) / ps.size


def lambda_tilde_average(xi: SurfacePoint, T: float, f: TestFunction, sieve: SieveTable, threads: int = 1) -> float:
    """(1/T) sum_{p <= T} f(xi h(p)) log p."""
    M = math.floor(T)
    if M > sieve.limit:
        raise CapacityError(f"T={T} exceeds sieve capacity {sieve.limit}")
    w = prime_weight_array(M, sieve)[1:]
    nz = np.flatnonzero(w)
    return weighted_orbit_total(xi, f, (nz + 1).astype(np.float64), w[nz], threads) / T


def continuous_average(xi: SurfacePoint, T: float, f: TestFunction, dt: float = 0.5, threads: int = 1) -> float:
    """(1/T) int_0^T f(xi h(t)) dt by composite Simpson with step <= dt."""
    if not 0 < dt <= 1:
        raise DomainError(f"need 0 < dt <= 1, got {dt}")
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    n = math.ceil(T / dt)
    n += n % 2
    t = np.linspace(0.0, T, n + 1)
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return weighted_orbit_total(xi, f, t, w, threads) * (T / n) / 3.0 / T
