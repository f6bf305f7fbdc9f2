"""Observables on X = PSL2(Z)\\G with known integrals, and the quadrature oracle.

A test function is given in the Iwasawa coordinates (x, y, theta) of the
reduced representative. Functions that depend on y only through the invariant
height and vanish near the unit arc are automatically well defined on X.

mu_X has density (3/pi) y^-2 dx dy dtheta/pi on the fundamental domain
{|x| <= 1/2, |z| >= 1} x [-pi/2, pi/2). With u = 1/y the (x, y) part becomes
dx du over 0 < u <= (1 - x^2)^-1/2, which removes the cusp.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as sp_integrate

from horolab.errors import DomainError
from horolab.modular import SurfacePoint
from horolab.psl2 import iwasawa

AREA_NORMALIZATION = 3.0 / math.pi
# max of the smoothstep derivative, attained at t = 1/2
RAMP_SLOPE = 630.0 / 256.0


class QuadratureWarning(RuntimeWarning):
    pass


def ramp(t):
    """C^4 smoothstep: 0 for t <= 0, 1 for t >= 1, monotone in between."""
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
    return t**5 * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t))))


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # not a pytest class

    label: str
    coords: Callable  # (x, y, theta) arrays -> values
    integral: float
    sup_norm: float
    lipschitz: float
    y_breaks: tuple[float, ...] = ()
    theta_dependent: bool = False

    def eval(self, p: SurfacePoint) -> float:
        c = iwasawa(p.rep)
        return float(self.coords(np.array([c.x]), np.array([c.y]), np.array([c.theta]))[0])

    def eval_coords(self, x, y, theta) -> np.ndarray:
        return np.asarray(self.coords(x, y, theta), dtype=np.float64)


def constant_function(value: float = 1.0) -> TestFunction:
    return TestFunction(
        label=f"const:{value!r}",
        coords=lambda x, y, th: np.full(np.shape(x), float(value)),
        integral=float(value),
        sup_norm=abs(float(value)),
        lipschitz=0.0,
    )


def height_integral(Y: float, w: float) -> float:
    """mu_X-integral of ramp((y0 - Y)/w) for Y >= 1."""
    if w == 0:
        return AREA_NORMALIZATION / Y
    # above Y + w the ramp is 1 and contributes 3/(pi (Y + w)) exactly
    inner, _ = sp_integrate.quad(lambda y: float(ramp((y - Y) / w)) / (y * y), Y, Y + w, epsabs=1e-15, epsrel=1e-13)
    return AREA_NORMALIZATION * (inner + 1.0 / (Y + w))


def make_height_function(Y: float = 2.0, w: float = 0.25) -> TestFunction:
    """f(p) = ramp((y0(p) - Y)/w): a smoothed indicator of the cusp region y0 > Y."""
    if not Y >= 1:
        raise DomainError(f"height threshold Y must be >= 1, got {Y}")
    if not w >= 0:
        raise DomainError(f"ramp width must be >= 0, got {w}")

    if w == 0:
        def coords(x, y, th):
            return (np.asarray(y) > Y).astype(np.float64)
        lip = math.inf
    else:
        def coords(x, y, th):
            return ramp((np.asarray(y, dtype=np.float64) - Y) / w)
        # |d log y| <= d_H(i-orbit) <= 2 * metric
        lip = 2.0 * RAMP_SLOPE * (Y + w) / w
    return TestFunction(
        label=f"height:Y={Y!r},w={w!r}",
        coords=coords,
        integral=height_integral(Y, w),
        sup_norm=1.0,
        lipschitz=lip,
        y_breaks=(Y, Y + w) if w > 0 else (Y,),
    )


def _bump(y):
    # supported on [1.25, 3], identically 1 on [1.5, 2.5]
    return ramp((y - 1.25) / 0.25) * (1.0 - ramp((y - 2.5) / 0.5))


def make_angular_function() -> TestFunction:
    """f(p) = sin(2 theta) bump(y0): not K-invariant, integral zero."""

    def coords(x, y, th):
        return np.sin(2.0 * np.asarray(th)) * _bump(np.asarray(y, dtype=np.float64))

    # theta moves at most one unit per unit of metric; the bump is in log y
    lip = 2.0 + 2.0 * RAMP_SLOPE * 3.0 / 0.25
    return TestFunction(
        label="angular",
        coords=coords,
        integral=0.0,
        sup_norm=1.0,
        lipschitz=lip,
        y_breaks=(1.25, 1.5, 2.5, 3.0),
        theta_dependent=True,
    )


def parse_function(spec: str) -> TestFunction:
    """'height:Y=2,w=0.25', 'angular' or 'const[:c]'."""
    name, _, rest = spec.partition(":")
    if name == "const":
        try:
            return constant_function(float(rest) if rest else 1.0)
        except ValueError as exc:
            raise DomainError(f"bad constant in {spec!r}") from exc
    kw = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise DomainError(f"bad test-function parameter {item!r}")
        try:
            kw[key.strip()] = float(val)
        except ValueError as exc:
            raise DomainError(f"bad test-function parameter {item!r}") from exc
    if name == "height":
        return make_height_function(kw.get("Y", 2.0), kw.get("w", 0.25))
    if name == "angular":
        return make_angular_function()
    raise DomainError(f"unknown test function {spec!r}")


def _panels(lo: float, hi: float, breaks) -> list[tuple[float, float]]:
    pts = sorted({lo, hi, *(b for b in breaks if lo < b < hi)})
    return list(zip(pts[:-1], pts[1:]))


def quadrature(f: TestFunction, n: int = 24, n_theta: int = 32) -> float:
    """Tensor Gauss-Legendre in (x, u), trapezoid in theta; u = 1/y."""
    gx, gw = np.polynomial.legendre.leggauss(n)
    u_breaks = sorted(1.0 / b for b in f.y_breaks)
    # x panels split where the unit arc crosses a u-break
    x_breaks = [math.sqrt(1.0 - 1.0 / (b * b)) for b in u_breaks if b > 1.0]
    x_breaks = [s * xb for xb in x_breaks for s in (-1.0, 1.0) if xb < 0.5]
    if f.theta_dependent:
        th = -math.pi / 2 + math.pi * np.arange(n_theta) / n_theta
    else:
        th = np.zeros(1)
    total = []
    for x0, x1 in _panels(-0.5, 0.5, x_breaks):
        xs = 0.5 * (x1 - x0) * gx + 0.5 * (x1 + x0)
        wx = 0.5 * (x1 - x0) * gw
        for xi, wxi in zip(xs.tolist(), wx.tolist()):
            umax = 1.0 / math.sqrt(1.0 - xi * xi)
            for u0, u1 in _panels(0.0, umax, u_breaks):
                us = 0.5 * (u1 - u0) * gx + 0.5 * (u1 + u0)
                wu = 0.5 * (u1 - u0) * gw
                X = np.full((us.size, th.size), xi)
                U = np.broadcast_to(us[:, None], X.shape)
                TH = np.broadcast_to(th[None, :], X.shape)
                vals = f.eval_coords(X, 1.0 / U, TH).mean(axis=1)
                total.append(wxi * float(np.dot(wu, vals)))
    return AREA_NORMALIZATION * math.fsum(total)


def integrate(f: TestFunction, tol: float = 1e-4) -> float:
    """mu_X(f) with a refinement check; warns if two levels disagree by > tol."""
    coarse = quadrature(f, 24, 32)
    fine = quadrature(f, 48, 64)
    if abs(fine - coarse) > tol:
        warnings.warn(f"quadrature for {f.label} not converged: {coarse} vs {fine}", QuadratureWarning)
    return fine
