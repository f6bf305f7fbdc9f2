"""Error-free transformations for compensated evaluation (scalar or numpy)."""

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(x, y):
    s = x + y
    z = s - x
    return s, (x - (s - z)) + (y - z)


def _split(x):
    c = _SPLITTER * x
    hi = c - (c - x)
    return hi, x - hi


def two_prod(x, y):
    """x*y = p + e exactly (barring overflow)."""
    p = x * y
    xh, xl = _split(x)
    yh, yl = _split(y)
    e = ((xh * yh - p) + xh * yl + xl * yh) + xl * yl
    return p, e


def dot2(m, x, n, y):
    """m*x + n*y evaluated as if in twice the working precision."""
    p1, e1 = two_prod(m, x)
    p2, e2 = two_prod(n, y)
    s, es = two_sum(p1, p2)
    return s + (es + (e1 + e2))


def affine2(x, t, y):
    """t*x + y as an unevaluated pair (hi, lo)."""
    p, e = two_prod(t, x)
    s, es = two_sum(p, y)
    return s, e + es


def dot2_pairs(m, hi1, lo1, n, hi2, lo2):
    """m*(hi1+lo1) + n*(hi2+lo2) with compensated leading terms."""
    return dot2(m, hi1, n, hi2) + (m * lo1 + n * lo2)


def as_array(x):
    return np.asarray(x, dtype=np.float64)
