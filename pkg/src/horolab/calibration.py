"""Sampled experiments whose extreme ratios define the shipped constants.

Each routine is deterministic given its seed. Constants are the observed
extreme times SAFETY, so a fresh seed is checked against them rather than
against itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from horolab.approx import approximant
from horolab.modular import fundamental_period, r_parameter
from horolab.sampling import haar_point, log_uniform

SAFETY = 1.2


@dataclass(frozen=True)
class Prop42Config:
    n: int = 1000
    T_min: float = 10.0
    T_max: float = 1e6


def prop42_products(seed: int, cfg: Prop42Config = Prop42Config()) -> np.ndarray:
    """r * y_T over Haar-random p and log-uniform T."""
    rng = np.random.default_rng(seed)
    out = np.empty(cfg.n)
    for i in range(cfg.n):
        p = haar_point(rng)
        T = log_uniform(rng, cfg.T_min, cfg.T_max)
        out[i] = r_parameter(p, T) * fundamental_period(p, T).yT
    return out


def spread_constant(products: np.ndarray) -> float:
    """Smallest C with every product in [1/C, C]."""
    return float(max(products.max(), 1.0 / products.min()))


@dataclass(frozen=True)
class ApproxConfig:
    n: int = 100
    T: float = 1e6
    delta: float = 0.1
    eta: float = 0.01
    samples: int = 101

    @property
    def K(self) -> float:
        return round(self.T ** (1.0 / 3.0), 9)


@dataclass(frozen=True)
class ApproxStats:
    dist_over_delta: float  # max measured_max_dist / delta
    period_over_r: float  # max period / r
    eta2r_over_period: float  # max eta^2 r / period
    core_length_over_bound: float  # max core-interval length / (K^2/delta)

    @property
    def worst(self) -> float:
        return max(self.dist_over_delta, self.period_over_r, self.eta2r_over_period)


def approx_stats(seed: int, cfg: ApproxConfig = ApproxConfig()) -> ApproxStats:
    """Admissible (p, t0): Haar p, t0 uniform in [0, T] outside the widened exceptional set."""
    rng = np.random.default_rng(seed)
    d = pu = pl = cl = 0.0
    bound = cfg.K**2 / cfg.delta
    for _ in range(cfg.n):
        p = haar_point(rng)
        while True:
            t0 = float(rng.uniform(0.0, cfg.T))
            rep = approximant(p, cfg.T, t0, cfg.K, cfg.delta, cfg.eta, cfg.samples)
            if not rep.inside_exceptional:
                break
        d = max(d, rep.measured_max_dist / cfg.delta)
        pu = max(pu, rep.period / rep.r)
        pl = max(pl, cfg.eta**2 * rep.r / rep.period)
        for iv in rep.excluded:
            if iv.kind == "core":
                cl = max(cl, iv.length / bound)
    return ApproxStats(d, pu, pl, cl)


def safe(x: float) -> float:
    return float(SAFETY * x) if math.isfinite(x) else x
