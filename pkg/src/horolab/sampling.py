"""Seeded random points of G and X used by experiments and tests."""

from __future__ import annotations

import math

import numpy as np

from horolab.modular import SurfacePoint, point_from_element
from horolab.psl2 import GroupElement, from_iwasawa

U_MAX = 2.0 / math.sqrt(3.0)


def haar_point(rng: np.random.Generator) -> SurfacePoint:
    """mu_X-distributed point: (x, 1/y) uniform on the fundamental domain in (x, u = 1/y)."""
    while True:
        x = rng.uniform(-0.5, 0.5)
        u = rng.uniform(0.0, U_MAX)
        if 0.0 < u <= 1.0 / math.sqrt(1.0 - x * x):
            return point_from_element(from_iwasawa(x, 1.0 / u, rng.uniform(-math.pi / 2, math.pi / 2)))


def random_element(rng: np.random.Generator, bound: float = 5.0, min_a: float = 0.2) -> GroupElement:
    """Element with all entries in [-bound, bound]: a, b, c uniform, d solved from det = 1."""
    while True:
        a, b, c = rng.uniform(-bound, bound, size=3)
        if abs(a) < min_a:
            continue
        d = (1.0 + b * c) / a
        if abs(d) <= bound:
            return GroupElement(a, b, c, d)


def log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(10 ** rng.uniform(math.log10(lo), math.log10(hi)))
