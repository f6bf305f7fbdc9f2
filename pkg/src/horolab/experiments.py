"""Desk-scale reproductions of the equidistribution statements.

Every experiment returns plain records; the CLI serializes them. Predicted
bounds are the bare error terms with implied constant 1, so ratios
discrepancy/bound are what one compares across runs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from horolab.errors import DomainError
from horolab.modular import SurfacePoint, fundamental_period, point_from_element, r_parameter
from horolab.orbits import lambda_tilde_average, orbit_sum, weighted_orbit_total
from horolab.psl2 import a as a_elem
from horolab.psl2 import group_mul, h
from horolab.sieve import (
    SieveTable,
    SieveWeightParams,
    mobius,
    nu_array,
    prime_weight_array,
    squarefree_divisors,
)
from horolab.testfun import TestFunction, integrate

# admissible exponents for PSL2(Z): theta = beta/40 with beta = 1/72
THETA_DEFAULT = 1.0 / 2880.0
BETA_DEFAULT = 1.0 / 72.0

CSV_HEADER = ("T", "s", "weight", "sum", "integral", "discrepancy", "r", "yT", "bound", "theta", "beta", "R")


@dataclass(frozen=True)
class ExperimentRecord:
    T: float
    s: float
    weight_kind: str
    sum_value: float
    integral: float
    discrepancy: float
    r: float
    yT: float
    bound: float
    theta: float
    beta: float
    R: float

    def row(self) -> list[str]:
        return [v if isinstance(v, str) else repr(float(v)) for v in astuple(self)]


def records_to_csv(records: Iterable[ExperimentRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in sorted(records, key=lambda r: (r.T, r.s)):
        w.writerow(rec.row())
    return buf.getvalue()


def records_from_csv(text: str) -> list[ExperimentRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if tuple(rows[0]) != CSV_HEADER:
        raise DomainError(f"unexpected header {rows[0]}")
    out = []
    for row in rows[1:]:
        vals = [row[2] if i == 2 else float(x) for i, x in enumerate(row)]
        out.append(ExperimentRecord(*vals))
    return out


def loglog_term(R: float) -> float:
    """log log R / log R; nan where log log R is undefined or negative (R <= e)."""
    if not R > math.e:
        return math.nan
    L = math.log(R)
    return math.log(L) / L


def equidist_bound(r: float, theta: float, R: float) -> float:
    return r ** (-theta) + loglog_term(R)


def venkatesh_bound(s: float, r: float, beta: float) -> float:
    return math.sqrt(s) * r ** (-beta / 2)


def regime_ratio(r: float, T: float) -> float:
    """r / T^(1/20): large values mean the well-equidistributed case."""
    return r / T ** 0.05


def discrepancy_experiment(
    xi: SurfacePoint,
    T_list: Sequence[float],
    weight: str,
    f: TestFunction,
    theta: float = THETA_DEFAULT,
    sieve: Optional[SieveTable] = None,
    R: Optional[float] = None,
    s: float = 1.0,
    beta: float = BETA_DEFAULT,
    threads: int = 1,
) -> list[ExperimentRecord]:
    """One record per T. R = T^theta unless given explicitly.

    bound column: uniform -> s^1/2 r^(-beta/2); nu -> r^-theta + loglog R/log R;
    prime -> (1/theta - 1) int f + r^-theta + loglog R/log R, the room the
    non-concentration inequality leaves above int f.
    """
    integral = integrate(f)
    out = []
    for T in sorted(T_list):
        RT = R if R is not None else T**theta
        rr = r_parameter(xi, T)
        yT = fundamental_period(xi, T).yT
        params = SieveWeightParams(RT) if weight == "nu" else None
        val = orbit_sum(xi, T, s, weight, f, sieve, params, threads)
        if weight == "uniform":
            bound = venkatesh_bound(s, rr, beta)
        elif weight == "nu":
            bound = equidist_bound(rr, theta, RT)
        else:
            bound = (1.0 / theta - 1.0) * integral + equidist_bound(rr, theta, RT)
        out.append(ExperimentRecord(T, s, weight, val, integral, abs(val - integral), rr, yT, bound, theta, beta, RT))
    return out


class PrimeReport(NamedTuple):
    prime_avg: float
    rhs: float
    slack: float
    lambda_avg: float  # (1/T) sum_{p <= T} f log p
    nu_avg: float  # (1/T) sum_{n <= T} f nu with R = T^theta
    small_primes: float  # (1/T) sum_{p < T^theta} f log p
    pointwise_ok: bool


def weight_comparison(T: float, theta: float, sieve: SieveTable, rtol: float = 1e-12) -> tuple[bool, float]:
    """Check log p 1_p(n) <= nu(n)/theta for every n in (T^theta, T] with R = T^theta.

    Returns (ok, max of lhs - rhs over the range).
    """
    M = math.floor(T)
    R = T**theta
    lam = prime_weight_array(M, sieve)
    nu = nu_array(M, SieveWeightParams(R), sieve) / theta
    lo = math.floor(R) + 1
    diff = lam[lo:] - nu[lo:]
    worst = float(diff.max()) if diff.size else -math.inf
    return bool(np.all(diff <= rtol * np.maximum(1.0, nu[lo:]))), worst


def prime_nonconcentration(
    xi: SurfacePoint, T: float, f: TestFunction, theta: float, sieve: SieveTable, threads: int = 1
) -> PrimeReport:
    """Prime average against (1/theta) int f plus a measured allowance.

    prime_avg = A + E with A = (1/T) sum f log p; on (T^theta, T] the weight
    log p is dominated by nu/theta, so A <= S_small + (int f + D)/theta where
    D is the signed nu-discrepancy. The allowance is |E| + S_small + |D|/theta.
    """
    if f.label.startswith("angular"):
        raise DomainError("the inequality needs a non-negative f")
    integral = integrate(f)
    R = T**theta
    prime_avg = orbit_sum(xi, T, 1.0, "prime", f, sieve, threads=threads)
    lam_avg = lambda_tilde_average(xi, T, f, sieve, threads)
    nu_avg = orbit_sum(xi, T, 1.0, "nu", f, sieve, SieveWeightParams(R), threads)
    ps = sieve.primes[sieve.primes <= R].astype(np.float64)
    small = weighted_orbit_total(xi, f, ps, np.log(ps)) / T if ps.size else 0.0
    allowance = abs(prime_avg - lam_avg) + small + abs(nu_avg - integral) / theta
    rhs = integral / theta + allowance
    ok, _ = weight_comparison(T, theta, sieve)
    return PrimeReport(prime_avg, rhs, rhs - prime_avg, lam_avg, nu_avg, small, ok)


def venkatesh_scan(
    xi: SurfacePoint, T: float, s_list: Sequence[float], f: TestFunction, beta: float = BETA_DEFAULT, threads: int = 1
) -> list[ExperimentRecord]:
    """Sparse averages (s/T) sum f(xi h(s j)) against s^1/2 r^(-beta/2)."""
    if any(s > T for s in s_list):
        raise DomainError("every step s must satisfy s <= T")
    integral = integrate(f)
    rr = r_parameter(xi, T)
    yT = fundamental_period(xi, T).yT
    out = []
    for s in sorted(s_list):
        val = orbit_sum(xi, T, s, "uniform", f, threads=threads)
        out.append(
            ExperimentRecord(
                T, s, "uniform", val, integral, abs(val - integral), rr, yT, venkatesh_bound(s, rr, beta),
                math.nan, beta, math.nan,
            )
        )
    return out


def dirichlet_approx(y: float, Q: int) -> tuple[int, int]:
    """Last continued-fraction convergent a/q of y with q <= Q.

    Then gcd(a, q) = 1 and |y - a/q| < 1/(q Q) (exact if y = a/q).
    """
    if Q < 1:
        raise DomainError("Q must be >= 1")
    x = Fraction(y)
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        ai = math.floor(x)
        p2, q2 = ai * p1 + p0, ai * q1 + q0
        if q2 > Q:
            return p1, q1
        p0, q0, p1, q1 = p1, q1, p2, q2
        frac = x - ai
        if frac == 0:
            return p1, q1
        x = 1 / frac


def closed_horocycle(P: float, x0: float = 0.0) -> SurfacePoint:
    """Point on the closed horocycle of period P (height 1/P) through x0 + i/P."""
    if not P > 0:
        raise DomainError("period must be positive")
    return point_from_element(group_mul(h(x0), a_elem(1.0 / P)))


def periodic_profile(xi: SurfacePoint, P: float, f: TestFunction, n: int = 4096) -> float:
    """int_0^1 F with F(t) = f(xi h(t P)); the trapezoid rule is spectral for periodic F."""
    t = np.arange(n, dtype=np.float64) * (P / n)
    return weighted_orbit_total(xi, f, t) / n


class SmallAPRecord(NamedTuple):
    s: int
    q: int
    measured: float
    claim_bound: float  # q^-eps with eps = beta/12
    venkatesh_ref: float  # s^1/2 y^(beta/2)
    regime: str  # "q<=y^-3" or "q>=y^-3"


def smallaps_experiment(
    P: float,
    q: int,
    s_list: Sequence[int],
    K: float,
    f: TestFunction,
    beta: float = BETA_DEFAULT,
    x0: float = 0.0,
) -> list[SmallAPRecord]:
    """|(s/K) sum_{sn <= K} F(y s n) - int F| on a closed horocycle of period P."""
    if any(q % s for s in s_list):
        raise DomainError(f"every s must divide q={q}")
    xi = closed_horocycle(P, x0)
    y = 1.0 / P
    eps = beta / 12.0
    mean = periodic_profile(xi, P, f)
    regime = "q<=y^-3" if q <= y**-3 else "q>=y^-3"
    out = []
    for s in sorted(s_list):
        J = math.floor(K / s)
        # F(y s n) = f(xi h(s n))
        val = weighted_orbit_total(xi, f, s * np.arange(1, J + 1, dtype=np.float64)) * s / K
        out.append(SmallAPRecord(s, q, abs(val - mean), q ** (-eps), math.sqrt(s) * y ** (beta / 2), regime))
    return out


def rational_rotation_check(P: float, f: TestFunction, x0: float, qp: int, a: int = 1) -> tuple[float, float]:
    """(|(1/q') sum_n F(x0 + n a/q') - int F|, y + 1/q') on the closed horocycle of period P."""
    if math.gcd(a, qp) != 1:
        raise DomainError("a must be coprime to q'")
    xi = closed_horocycle(P)
    n = np.arange(qp, dtype=np.float64)
    t = (x0 + ((n * a) % qp) / qp) * P
    val = weighted_orbit_total(xi, f, t) / qp
    return abs(val - periodic_profile(xi, P, f)), 1.0 / P + 1.0 / qp


def coprime_decomposition_check(P: float, q: int, K: float, f: TestFunction, t: SieveTable) -> tuple[float, float]:
    """sum_{n<=K,(n,q)=1} F(yn) against sum_{d|q} mu(d) sum_{dn<=K} F(ydn)."""
    xi = closed_horocycle(P)
    N = math.floor(K)
    n = np.arange(1, N + 1)
    coprime = n[np.gcd(n, q) == 1].astype(np.float64)
    lhs = weighted_orbit_total(xi, f, coprime)
    parts = []
    for d in squarefree_divisors(q, t):
        parts.append(mobius(d, t) * weighted_orbit_total(xi, f, d * np.arange(1, N // d + 1, dtype=np.float64)))
    return lhs, math.fsum(parts)


def gcd_ordering_check(R: float) -> tuple[float, float]:
    """sum_{e,d <= R} [d,e]^-1/2 against sum_{m <= R} sum_{e,d <= R/m} (edm)^-1/2."""
    n = math.floor(R)
    e = np.arange(1, n + 1, dtype=np.int64)
    lhs = []
    for d in range(1, n + 1):
        lcm = e * d // np.gcd(e, d)
        lhs.append(math.fsum((1.0 / np.sqrt(lcm)).tolist()))
    rhs = []
    for m in range(1, n + 1):
        k = n // m
        h1 = math.fsum((1.0 / np.sqrt(np.arange(1, k + 1, dtype=np.float64))).tolist())
        rhs.append(h1 * h1 / math.sqrt(m))
    return math.fsum(lhs), math.fsum(rhs)


def record_fields() -> tuple[str, ...]:
    return tuple(fl.name for fl in fields(ExperimentRecord))
