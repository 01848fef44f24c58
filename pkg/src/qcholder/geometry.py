"""Chordal metric, sphere quadrature and moduli of spherical rings.

Points of the compactified space are plain coordinate sequences or the
module-level sentinel :data:`INF`.  No coordinate representation of the
point at infinity is ever built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from .errors import InputError

__all__ = [
    "INF",
    "Annulus",
    "SphereQuadrature",
    "ball_volume",
    "chordal_diameter",
    "chordal_distance",
    "complement_ball_chordal_diameter",
    "gamma_half_integer",
    "ring_modulus",
    "sphere_area",
    "sphere_quadrature",
]


class _Infinity:
    """The point at infinity of the one-point compactification."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

ExtendedPoint = Union[Sequence[float], np.ndarray, _Infinity]


def gamma_half_integer(x: float) -> float:
    """Gamma function at a positive integer or half-integer argument.

    Uses the closed forms ``Γ(k) = (k-1)!`` and
    ``Γ(k + 1/2) = (2k)! √π / (4^k k!)``.
    """
    twice = 2 * x
    m = int(round(twice))
    if m <= 0 or abs(twice - m) > 1e-12:
        raise InputError(f"gamma_half_integer needs a positive (half-)integer, got {x!r}")
    if m % 2 == 0:
        return float(math.factorial(m // 2 - 1))
    k = (m - 1) // 2
    return math.factorial(2 * k) * math.sqrt(math.pi) / (4**k * math.factorial(k))


def sphere_area(n: int) -> float:
    """(n-1)-measure of the unit sphere in R^n, ``2 π^{n/2} / Γ(n/2)``."""
    if n < 1:
        raise InputError(f"dimension must be >= 1, got {n}")
    return 2.0 * math.pi ** (n / 2) / gamma_half_integer(n / 2)


def ball_volume(n: int) -> float:
    """Lebesgue measure of the unit ball in R^n."""
    return sphere_area(n) / n


def _as_finite(x) -> np.ndarray:
    p = np.asarray(x, dtype=float).reshape(-1)
    if p.size < 2:
        raise InputError(f"points need dimension >= 2, got {p.size}")
    return p


def chordal_distance(x: ExtendedPoint, y: ExtendedPoint) -> float:
    """Chordal distance ``|x-y| / (sqrt(1+|x|^2) sqrt(1+|y|^2))``.

    With one argument at infinity the distance is ``1/sqrt(1+|x|^2)``.
    """
    x_inf = x is INF
    y_inf = y is INF
    if x_inf and y_inf:
        return 0.0
    if x_inf or y_inf:
        p = _as_finite(y if x_inf else x)
        return 1.0 / math.sqrt(1.0 + float(p @ p))
    p = _as_finite(x)
    q = _as_finite(y)
    if p.shape != q.shape:
        raise InputError(f"dimension mismatch: {p.size} vs {q.size}")
    d = p - q
    return math.sqrt(float(d @ d)) / (math.sqrt(1.0 + float(p @ p)) * math.sqrt(1.0 + float(q @ q)))


def chordal_diameter(points: Sequence[ExtendedPoint]) -> float:
    """Largest pairwise chordal distance of a finite point set."""
    pts = list(points)
    if not pts:
        raise InputError("chordal_diameter of an empty set")
    return max((chordal_distance(a, b) for a, b in combinations(pts, 2)), default=0.0)


def complement_ball_chordal_diameter(r0: float) -> float:
    """Chordal diameter of the complement of ``B(0, r0)`` in the compactified space.

    For points with norms s, t >= r0 one has ``(s+t)^2 <= (1+s^2)(1+t^2)`` with
    equality iff st = 1, so the diameter is 1 when ``r0 <= 1``; otherwise it is
    attained by antipodal points on ``S(0, r0)``.
    """
    if not r0 > 0:
        raise InputError(f"r0 must be positive, got {r0!r}")
    if r0 <= 1.0:
        return 1.0
    return 2.0 * r0 / (1.0 + r0 * r0)


@dataclass(frozen=True)
class Annulus:
    center: tuple
    r1: float
    r2: float

    def __post_init__(self):
        if not (0 < self.r1 < self.r2 < math.inf):
            raise InputError(f"annulus needs 0 < r1 < r2 < inf, got ({self.r1}, {self.r2})")

    @property
    def dimension(self) -> int:
        return len(self.center)

    def contains(self, x) -> bool:
        d = np.asarray(x, dtype=float) - np.asarray(self.center, dtype=float)
        return bool(self.r1 < math.sqrt(float(d @ d)) < self.r2)


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes on ``S(center, radius)`` and nonnegative weights summing to its area.

    ``stderr_scale`` is nonzero only for the Monte Carlo rule; multiply the
    sample standard deviation of an integrand by it to get a standard error.
    """

    center: np.ndarray
    radius: float
    nodes: np.ndarray
    weights: np.ndarray
    method: str
    stderr_scale: float = 0.0

    @property
    def dimension(self) -> int:
        return self.nodes.shape[1]

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _circle_directions(m: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(m) / m
    c, s = np.cos(theta), np.sin(theta)
    # exact zeros at quarter turns keep axis-aligned nodes exact
    c[np.isclose(c, 0.0, atol=1e-15)] = 0.0
    s[np.isclose(s, 0.0, atol=1e-15)] = 0.0
    return np.column_stack([c, s])


def _sphere2_rule(m: int) -> tuple[np.ndarray, np.ndarray]:
    # Gauss-Legendre in cos(theta) carries the sin(theta) Jacobian exactly
    n_polar = max(2, (m + 1) // 2)
    z, wz = np.polynomial.legendre.leggauss(n_polar)
    phi = 2.0 * np.pi * np.arange(m) / m
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    rho = np.sqrt(1.0 - zz**2)
    dirs = np.column_stack([(rho * np.cos(pp)).ravel(), (rho * np.sin(pp)).ravel(), zz.ravel()])
    w = np.repeat(wz, m) * (2.0 * np.pi / m)
    return dirs, w


def _monte_carlo_directions(n: int, m: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    half = max(1, m // 2)
    g = rng.standard_normal((half, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    # antithetic pairs make odd moments vanish exactly
    return np.vstack([g, -g])


def sphere_quadrature(n: int, x0, r: float, resolution: int, seed: int = 0) -> SphereQuadrature:
    """Quadrature rule on the sphere ``S(x0, r)`` in R^n.

    n = 2: ``resolution`` equally spaced nodes (trapezoid rule).
    n = 3: ``resolution`` azimuthal nodes times ``ceil(resolution/2)``
    Gauss-Legendre nodes in the polar cosine.
    n >= 4: ``resolution`` seeded random nodes in antithetic pairs.
    """
    if not r > 0:
        raise InputError(f"sphere radius must be positive, got {r!r}")
    if n < 2:
        raise InputError(f"dimension must be >= 2, got {n}")
    if resolution < 1:
        raise InputError(f"resolution must be >= 1, got {resolution}")
    center = np.zeros(n) if np.isscalar(x0) and x0 == 0 else np.asarray(x0, dtype=float).reshape(-1)
    if center.size != n:
        raise InputError(f"center has dimension {center.size}, expected {n}")
    area = sphere_area(n) * r ** (n - 1)
    scale = 0.0
    if n == 2:
        dirs = _circle_directions(resolution)
        w = np.full(resolution, area / resolution)
        method = "trapezoid"
    elif n == 3:
        dirs, w = _sphere2_rule(resolution)
        w = w * r**2
        method = "gauss-product"
    else:
        dirs = _monte_carlo_directions(n, resolution, seed)
        w = np.full(len(dirs), area / len(dirs))
        method = "monte-carlo"
        scale = area / math.sqrt(len(dirs))
    return SphereQuadrature(center, float(r), center + r * dirs, w, method, scale)


def ring_modulus(n: int, r1: float, r2: float) -> float:
    """Modulus of the curve family joining the boundary spheres of ``A(x0, r1, r2)``.

    Equals ``ω_{n-1} (log(r2/r1))^{1-n}``.
    """
    if not (0 < r1 < r2):
        raise InputError(f"ring_modulus needs 0 < r1 < r2, got ({r1}, {r2})")
    return sphere_area(n) * math.log(r2 / r1) ** (1 - n)
