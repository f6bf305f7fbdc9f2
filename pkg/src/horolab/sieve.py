"""Exact arithmetic tables and the truncated divisor-sum weights.

The weights are

    Lambda_R(n) = sum_{k < R, k | n} mu(k) log(R / k)
    nu(n)       = Lambda_R(n)**2 / log R

together with the averages that make ``nu`` a stand-in for the primes:
Goldston-Yildirim type sums over squarefree moduli, the singular series,
progression averages and a Siegel-Walfisz comparison.

Every long sum goes through :func:`math.fsum`, so results are correctly
rounded and do not depend on summation order or chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from horolab.errors import CapacityError, DomainError, PreconditionError

# int8 mobius + int32 spf + int32 phi = 9 bytes per entry
BYTES_PER_ENTRY = 9
DEFAULT_MEMORY_BUDGET = 2 * 1024**3


@dataclass(frozen=True, eq=False)
class SieveTable:
    """Mobius, smallest-prime-factor and totient tables for 0..limit.

    Index 0 is padding (all zero). Arrays are read-only after construction.
    """

    limit: int
    mobius: np.ndarray
    spf: np.ndarray
    phi: np.ndarray
    primes: np.ndarray

    def __repr__(self):
        return f"SieveTable(limit={self.limit})"


@dataclass(frozen=True)
class SieveWeightParams:
    R: float
    logR: float = field(init=False)

    def __post_init__(self):
        if not self.R > 1:
            raise DomainError(f"sieve level R must exceed 1, got {self.R}")
        object.__setattr__(self, "logR", math.log(self.R))


class SumCheck(NamedTuple):
    lhs: float
    rhs: float
    residual: float


class SiegelWalfiszReport(NamedTuple):
    weighted: float
    coprime_side: float
    residual: float


@dataclass(frozen=True)
class ProgressionAverageReport:
    lhs: float
    main_term: float
    residual: float
    interval: tuple[int, int]
    q: int
    j: int
    low_confidence: bool


def primes_up_to(n: int) -> np.ndarray:
    """Primes <= n by a plain Eratosthenes sieve (no table needed)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def build_sieve_table(N: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> SieveTable:
    """Tabulate mu, smallest prime factor and phi for every n <= N."""
    N = int(N)
    if N < 1:
        raise DomainError(f"table limit must be >= 1, got {N}")
    if N >= 2**31 - 1 or (N + 1) * BYTES_PER_ENTRY > memory_budget:
        raise CapacityError(
            f"sieve table up to {N} needs {(N + 1) * BYTES_PER_ENTRY} bytes, "
            f"budget is {memory_budget}"
        )

    spf = np.zeros(N + 1, dtype=np.int32)
    root = math.isqrt(N)
    for p in range(2, root + 1):
        if spf[p] == 0:
            view = spf[p * p :: p]
            view[view == 0] = p
    idx = np.arange(N + 1, dtype=np.int32)
    unset = spf == 0
    unset[:2] = False
    spf[unset] = idx[unset]
    primes = np.flatnonzero(unset).astype(np.int64)

    mobius = np.ones(N + 1, dtype=np.int8)
    mobius[0] = 0
    phi = idx.copy()

    small = primes[primes <= root]
    for p in small.tolist():
        mobius[p::p] *= -1
        mobius[p * p :: p * p] = 0
        view = phi[p::p]
        view -= view // p
    # every n has at most one prime factor above sqrt(N); sweep those by cofactor
    large = primes[primes > root]
    for m in range(1, N // (root + 1) + 1):
        ps = large[: np.searchsorted(large, N // m, side="right")]
        if ps.size == 0:
            break
        at = ps * m
        mobius[at] *= -1
        phi[at] -= phi[at] // ps.astype(np.int32)

    for arr in (mobius, spf, phi):
        arr.setflags(write=False)
    primes.setflags(write=False)
    return SieveTable(N, mobius, spf, phi, primes)


def _check(n: int, t: SieveTable) -> int:
    n = int(n)
    if not 1 <= n <= t.limit:
        raise DomainError(f"n={n} outside table range 1..{t.limit}")
    return n


def factorize(n: int, t: SieveTable) -> list[tuple[int, int]]:
    """Prime factorization of n as [(p, e), ...] with p increasing."""
    n = _check(n, t)
    out: list[tuple[int, int]] = []
    while n > 1:
        p = int(t.spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def is_prime(n: int, t: SieveTable) -> bool:
    n = _check(n, t)
    return n >= 2 and int(t.spf[n]) == n


def mobius(n: int, t: SieveTable) -> int:
    return int(t.mobius[_check(n, t)])


def euler_phi(n: int, t: SieveTable) -> int:
    return int(t.phi[_check(n, t)])


def divisor_count(n: int, t: SieveTable) -> int:
    return math.prod(e + 1 for _, e in factorize(n, t))


def squarefree_divisors(n: int, t: SieveTable) -> list[int]:
    divs = [1]
    for p, _ in factorize(n, t):
        divs += [d * p for d in divs]
    return sorted(divs)


def lambda_r(n: int, p: SieveWeightParams, t: SieveTable) -> float:
    """Lambda_R(n) as the literal divisor sum over k | n, k < R."""
    terms = []
    for k in squarefree_divisors(n, t):
        if k < p.R:
            terms.append(int(t.mobius[k]) * (p.logR - math.log(k)))
    return math.fsum(terms)


def nu_weight(n: int, p: SieveWeightParams, t: SieveTable) -> float:
    return lambda_r(n, p, t) ** 2 / p.logR


def prime_weight(n: int, t: SieveTable) -> float:
    """log n at primes, 0 elsewhere."""
    return math.log(n) if is_prime(n, t) else 0.0


def _sieve_moduli(p: SieveWeightParams, t: SieveTable) -> tuple[np.ndarray, np.ndarray]:
    """Squarefree k < R with their coefficients mu(k) log(R/k)."""
    kmax = math.ceil(p.R) - 1
    if kmax > t.limit:
        raise CapacityError(f"R={p.R} exceeds table limit {t.limit}")
    k = np.arange(1, kmax + 1)
    k = k[k < p.R]
    mu = t.mobius[k].astype(np.float64)
    keep = mu != 0
    k = k[keep]
    return k, mu[keep] * (p.logR - np.log(k))


def lambda_r_array(M: int, p: SieveWeightParams, t: SieveTable) -> np.ndarray:
    """Lambda_R(n) for n = 0..M (entry 0 is set to 0)."""
    M = int(M)
    out = np.zeros(M + 1, dtype=np.float64)
    ks, coef = _sieve_moduli(p, t)
    for k, c in zip(ks.tolist(), coef.tolist()):
        out[k::k] += c
    out[0] = 0.0
    return out


def nu_array(M: int, p: SieveWeightParams, t: SieveTable) -> np.ndarray:
    lam = lambda_r_array(M, p, t)
    return lam * lam / p.logR


def prime_weight_array(M: int, t: SieveTable) -> np.ndarray:
    if M > t.limit:
        raise CapacityError(f"M={M} exceeds table limit {t.limit}")
    out = np.zeros(M + 1, dtype=np.float64)
    ps = t.primes[t.primes <= M]
    out[ps] = np.log(ps)
    return out


@lru_cache(maxsize=16)
def twin_constant(prime_cutoff: int = 10**6) -> float:
    """Partial product of (1 - 1/(p-1)^2) over odd primes p <= cutoff."""
    if prime_cutoff < 3:
        raise DomainError("prime cutoff must be >= 3")
    ps = primes_up_to(int(prime_cutoff))
    ps = ps[ps > 2].astype(np.float64)
    return math.exp(math.fsum(np.log1p(-1.0 / (ps - 1.0) ** 2).tolist()))


def _odd_prime_factors(n: int) -> list[int]:
    out = []
    while n % 2 == 0:
        n //= 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 2
    if n > 1:
        out.append(n)
    return out


def singular_series(k: int, prime_cutoff: int = 10**6) -> float:
    """Twin-prime singular series; zero on odd arguments."""
    k = int(k)
    if k < 1:
        raise DomainError("k must be >= 1")
    if k % 2:
        return 0.0
    val = 2.0 * twin_constant(prime_cutoff)
    for q in _odd_prime_factors(k // 2):
        val *= (q - 1) / (q - 2)
    return val


def singular_series_array(M: int, t: SieveTable, prime_cutoff: int = 10**6) -> np.ndarray:
    """Singular series for k = 0..M (entry 0 is 0)."""
    out = np.zeros(M + 1, dtype=np.float64)
    out[2::2] = 2.0 * twin_constant(prime_cutoff)
    ps = primes_up_to(M // 2)
    for q in ps[ps > 2].tolist():
        out[2 * q :: 2 * q] *= (q - 1) / (q - 2)
    return out


def _coprime_mask(d: np.ndarray, k: int) -> np.ndarray:
    return np.gcd(d, k) == 1


def goldston_lemma1(R: float, k: int, kind: str, t: SieveTable, prime_cutoff: int = 10**6) -> SumCheck:
    """Sum over squarefree d <= R coprime to k of mu(d)/d log(R/d) (or mu(d)/phi(d) ...).

    ``kind="unit"`` compares with k/phi(k), ``kind="phi"`` with the singular series.
    """
    if kind not in ("unit", "phi"):
        raise DomainError(f"kind must be 'unit' or 'phi', got {kind!r}")
    if R < 2:
        raise DomainError("R must be >= 2")
    if R > t.limit:
        raise CapacityError(f"R={R} exceeds table limit {t.limit}")
    k = int(k)
    if not 1 <= k <= R:
        raise DomainError(f"need 1 <= k <= R, got k={k}")
    d = np.arange(1, math.floor(R) + 1)
    d = d[(t.mobius[d] != 0) & _coprime_mask(d, k)]
    denom = d if kind == "unit" else t.phi[d]
    terms = t.mobius[d] / denom.astype(np.float64) * np.log(R / d)
    lhs = math.fsum(terms.tolist())
    if kind == "unit":
        rhs = k / euler_phi(k, t)
    else:
        rhs = singular_series(k, prime_cutoff)
    return SumCheck(lhs, rhs, lhs - rhs)


def goldston_lemma2(R: float, k: int, t: SieveTable, prime_cutoff: int = 10**6) -> SumCheck:
    """Sum over d <= R coprime to k of mu^2(d)/phi(d) * S2(dk), against log R."""
    k = int(k)
    if R > t.limit:
        raise CapacityError(f"R={R} exceeds table limit {t.limit}")
    if not 1 <= k <= R:
        raise DomainError(f"need 1 <= k <= R, got k={k}")
    d = np.arange(1, math.floor(R) + 1)
    d = d[(t.mobius[d] != 0) & _coprime_mask(d, k)]
    ss = singular_series_array(int(d[-1]) * k, t, prime_cutoff)
    terms = ss[d * k] / t.phi[d].astype(np.float64)
    lhs = math.fsum(terms.tolist())
    rhs = math.log(R)
    return SumCheck(lhs, rhs, lhs - rhs)


def nu_progression_average(
    start: int, length: int, q: int, j: int, p: SieveWeightParams, t: SieveTable
) -> ProgressionAverageReport:
    """Average of Lambda_R(qn + j)^2 over n in [start, start + length)."""
    start, length, q, j = int(start), int(length), int(q), int(j)
    if length < 1 or start < 0 or q < 1:
        raise DomainError("need start >= 0, length >= 1, q >= 1")
    if math.gcd(j, q) != 1:
        raise DomainError(f"residue j={j} is not coprime to q={q}")
    top = q * (start + length) + j
    if top > t.limit:
        raise CapacityError(f"q(start+length)+j = {top} exceeds table limit {t.limit}")
    lam = lambda_r_array(top, p, t)
    idx = q * np.arange(start, start + length, dtype=np.int64) + j
    vals = lam[idx]
    lhs = math.fsum((vals * vals).tolist()) / length
    main = q / euler_phi(q, t) * p.logR
    return ProgressionAverageReport(
        lhs=lhs,
        main_term=main,
        residual=lhs - main,
        interval=(start, length),
        q=q,
        j=j,
        low_confidence=length < p.R**2,
    )


def siegel_walfisz_check(
    start: int, length: int, q: int, f: Sequence[float], p: SieveWeightParams, t: SieveTable
) -> SiegelWalfiszReport:
    """Compare the nu-weighted average of a q-periodic f with its coprime-residue average.

    ``f[r]`` is the value on n = r (mod q); f is rescaled to max |f| = 1.
    """
    start, length, q = int(start), int(length), int(q)
    fv = np.asarray(f, dtype=np.float64)
    if fv.shape != (q,):
        raise DomainError(f"f must have exactly q={q} entries")
    need = math.ceil(q * p.R**3)
    if length < need:
        raise PreconditionError(
            f"interval length {length} is shorter than q R^3 = {need}", required=need
        )
    top = start + length - 1
    if start < 1 or top > t.limit:
        raise CapacityError(f"interval [{start}, {top}] exceeds table range 1..{t.limit}")
    scale = np.max(np.abs(fv))
    if scale > 0:
        fv = fv / scale
    nu = nu_array(top, p, t)[start:]
    n = np.arange(start, top + 1, dtype=np.int64)
    fn = fv[n % q]
    weighted = math.fsum((fn * nu).tolist()) / length
    coprime = _coprime_mask(n, q)
    coprime_side = q / euler_phi(q, t) * math.fsum(fn[coprime].tolist()) / length
    return SiegelWalfiszReport(weighted, coprime_side, weighted - coprime_side)


def nu_average(N: int, p: SieveWeightParams, t: SieveTable) -> float:
    """(1/N) sum_{n <= N} nu(n)."""
    if N > t.limit:
        raise CapacityError(f"N={N} exceeds table limit {t.limit}")
    return math.fsum(nu_array(N, p, t)[1:].tolist()) / N


def first_error_sum(R: float, cut: float = 1.0) -> float:
    """sum_{k <= cut*R, k < R} 1 / (k log(R/k))."""
    k = np.arange(1, math.ceil(R), dtype=np.float64)
    k = k[(k < R) & (k <= cut * R)]
    return math.fsum((1.0 / (k * np.log(R / k))).tolist())


def second_error_sum(R: float, t: SieveTable, cut: float = 1.0) -> float:
    """sum_{k <= cut*R, k < R} 1 / (phi(k) log^2(R/k))."""
    if R > t.limit + 1:
        raise CapacityError(f"R={R} exceeds table limit {t.limit}")
    k = np.arange(1, math.ceil(R), dtype=np.int64)
    k = k[(k < R) & (k <= cut * R)]
    terms = 1.0 / (t.phi[k].astype(np.float64) * np.log(R / k) ** 2)
    return math.fsum(terms.tolist())
