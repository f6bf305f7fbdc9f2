"""Kinematics of G = PSL2(R).

Elements are stored as 2x2 real matrices of determinant one in a canonical
sign (c > 0, or c == 0 and a > 0), which makes +-I ambiguity disappear.

Conventions:
    h(x) = [[1, x], [0, 1]]
    a(y) = [[sqrt(y), 0], [0, 1/sqrt(y)]]
    k(t) = [[cos t, sin t], [-sin t, cos t]]
    geodesic flow   g -> g a(e^t)
    horocycle flow  g -> g h(t)

Every g factors uniquely as h(x) a(y) k(theta) with y > 0 and
theta in [-pi/2, pi/2). The tangent-bundle picture sends that element to
(x + iy, exp(2i theta)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from horolab.errors import DomainError
from horolab.numerics import dot2

DET_RENORM = 1e-13
HALF_PI = math.pi / 2

# second reference point for the comparison metric; a rotation by t about i
# moves it by ~2|t| sinh(asinh 1) = 2|t|
METRIC_AUX_POINT = complex(0.0, 1.0 + math.sqrt(2.0))


@dataclass(frozen=True)
class GroupElement:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = float(self.a), float(self.b), float(self.c), float(self.d)
        # compensated, so large entries do not fake a drift
        det = dot2(a, d, -b, c)
        if not det > 0 or not math.isfinite(det):
            raise DomainError(f"matrix ({a}, {b}, {c}, {d}) has determinant {det}, not in SL2")
        if abs(det - 1.0) > DET_RENORM:
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        if c < 0 or (c == 0 and a < 0):
            a, b, c, d = -a, -b, -c, -d
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @property
    def det(self) -> float:
        return dot2(self.a, self.d, -self.b, self.c)

    def entries(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return group_mul(self, other)

    def __str__(self):
        return format_element(self)


@dataclass(frozen=True)
class IwasawaCoords:
    x: float
    y: float
    theta: float


@dataclass(frozen=True)
class TangentPoint:
    z: complex
    v: complex

    def __post_init__(self):
        if not self.z.imag > 0:
            raise DomainError(f"base point {self.z} is not in the upper half plane")
        r = abs(self.v)
        if r == 0:
            raise DomainError("direction must be nonzero")
        object.__setattr__(self, "v", self.v / r)


IDENTITY = GroupElement(1.0, 0.0, 0.0, 1.0)


def h(x: float) -> GroupElement:
    return GroupElement(1.0, x, 0.0, 1.0)


def a(y: float) -> GroupElement:
    if not y > 0:
        raise DomainError(f"a(y) needs y > 0, got {y}")
    s = math.sqrt(y)
    return GroupElement(s, 0.0, 0.0, 1.0 / s)


def k(theta: float) -> GroupElement:
    c, s = math.cos(theta), math.sin(theta)
    return GroupElement(c, s, -s, c)


def group_mul(g: GroupElement, q: GroupElement) -> GroupElement:
    return GroupElement(
        g.a * q.a + g.b * q.c,
        g.a * q.b + g.b * q.d,
        g.c * q.a + g.d * q.c,
        g.c * q.b + g.d * q.d,
    )


def group_inv(g: GroupElement) -> GroupElement:
    return GroupElement(g.d, -g.b, -g.c, g.a)


def same_element(g: GroupElement, q: GroupElement, tol: float = 1e-12) -> bool:
    """Equality in PSL2, entrywise within tol (relative to entry size)."""
    scale = max(1.0, *map(abs, g.entries()), *map(abs, q.entries()))
    for sign in (1.0, -1.0):
        if all(abs(x - sign * y) <= tol * scale for x, y in zip(g.entries(), q.entries())):
            return True
    return False


def fold_angle(theta: float) -> float:
    """Reduce an angle mod pi into [-pi/2, pi/2)."""
    t = math.fmod(theta + HALF_PI, math.pi)
    if t < 0:
        t += math.pi
    t -= HALF_PI
    if t >= HALF_PI:
        t -= math.pi
    return t


def iwasawa(g: GroupElement) -> IwasawaCoords:
    n = g.c * g.c + g.d * g.d
    x = (g.a * g.c + g.b * g.d) / n
    theta = fold_angle(math.atan2(-g.c, g.d))
    return IwasawaCoords(x, 1.0 / n, theta)


def from_iwasawa(x: float, y: float, theta: float) -> GroupElement:
    if not y > 0:
        raise DomainError(f"Iwasawa height must be positive, got {y}")
    sy = math.sqrt(y)
    c, s = math.cos(theta), math.sin(theta)
    return GroupElement(sy * c - x * s / sy, sy * s + x * c / sy, -s / sy, c / sy)


def mobius_point(g: GroupElement, z: complex) -> complex:
    if not z.imag > 0:
        raise DomainError(f"{z} is not in the upper half plane")
    den = g.c * z + g.d
    w = (g.a * z + g.b) / den
    # Im(g.z) = Im z / |cz+d|^2 exactly; keeps the imaginary part positive
    return complex(w.real, z.imag / (den.real**2 + den.imag**2))


def tangent_action(g: GroupElement, p: TangentPoint) -> TangentPoint:
    den = g.c * p.z + g.d
    return TangentPoint(mobius_point(g, p.z), p.v / den**2)


def to_tangent(g: GroupElement) -> TangentPoint:
    c = iwasawa(g)
    return TangentPoint(complex(c.x, c.y), cmath.exp(2j * c.theta))


def geodesic_flow(g: GroupElement, t: float) -> GroupElement:
    if abs(t) > 700:
        raise DomainError(f"geodesic time {t} overflows double precision")
    e = math.exp(t / 2)
    return GroupElement(g.a * e, g.b / e, g.c * e, g.d / e)


def horocycle_flow(g: GroupElement, t: float) -> GroupElement:
    return GroupElement(g.a, g.b + g.a * t, g.c, g.d + g.c * t)


def hyperbolic_distance(z: complex, w: complex) -> float:
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))


def metric(g1: GroupElement, g2: GroupElement) -> float:
    """Left-invariant metric on G, bi-Lipschitz to the Riemannian one.

    Average of the hyperbolic displacements of i and of a second point on the
    imaginary axis. Both terms are G-invariant pseudometrics, and only the
    identity fixes two distinct points, so this is a metric.
    """
    u = group_mul(group_inv(g1), g2)
    d1 = hyperbolic_distance(1j, mobius_point(u, 1j))
    w = METRIC_AUX_POINT
    d2 = hyperbolic_distance(w, mobius_point(u, w))
    return 0.5 * (d1 + d2)


def haar_density(x: float, y: float) -> float:
    if not y > 0:
        raise DomainError(f"y must be positive, got {y}")
    return 1.0 / (y * y)


def parse_element(text: str) -> GroupElement:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise DomainError(f"expected 'a,b,c,d', got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise DomainError(f"non-numeric entry in {text!r}") from exc
    return GroupElement(*vals)


def format_element(g: GroupElement) -> str:
    return ",".join(repr(v) for v in g.entries())
