"""End-to-end checks: measured Hölder exponents, the ring inequality on radial benchmarks, and a Monte Carlo oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .certificates import HolderCertificate
from .errors import DegenerateFitError, InputError, UnsupportedMapError
from .fields import BenchmarkMap, ScalarField
from .geometry import chordal_distance, ring_modulus, sphere_area
from .means import _center, _sphere_mean, default_resolution, log_radial_integral
from .quadrature import adaptive_simpson

__all__ = [
    "AnnulusRegion",
    "BallRegion",
    "CertificateCheck",
    "ExponentFit",
    "LensRegion",
    "OracleEstimate",
    "RingCheck",
    "check_certificate",
    "empirical_holder_exponent",
    "extremal_eta",
    "oracle_integral",
    "sample_directions",
    "verify_ring_inequality",
]


# ---------------------------------------------------------------- exponent fits


def _fibonacci_sphere(m: int) -> np.ndarray:
    k = np.arange(m) + 0.5
    z = 1.0 - 2.0 * k / m
    phi = math.pi * (1.0 + math.sqrt(5.0)) * k
    rho = np.sqrt(1.0 - z * z)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def sample_directions(n: int, seed: int = 0) -> np.ndarray:
    """64 equally spaced directions (n = 2), 256 Fibonacci points (n = 3), 256 seeded Gaussian ones otherwise."""
    if n == 2:
        t = 2.0 * np.pi * np.arange(64) / 64
        return np.column_stack([np.cos(t), np.sin(t)])
    if n == 3:
        return _fibonacci_sphere(256)
    g = np.random.default_rng(seed).standard_normal((256, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True)
class ExponentFit:
    center: tuple
    radii: np.ndarray
    displacements: np.ndarray
    slope: float
    intercept: float
    residual_rms: float

    @property
    def constant(self) -> float:
        return math.exp(self.intercept)


def empirical_holder_exponent(
    f: BenchmarkMap, x0=0, radii: Optional[Sequence[float]] = None, seed: int = 0
) -> ExponentFit:
    """Least-squares slope of ``log max_u |f(x0 + r u) - f(x0)|`` against ``log r``.

    Default radii: 16 points log-spaced over [1e-4, 1e-1].
    """
    c = np.zeros(f.n) if np.isscalar(x0) and x0 == 0 else np.asarray(x0, dtype=float).reshape(-1)
    if c.size != f.n:
        raise InputError(f"center has dimension {c.size}, map has {f.n}")
    rr = np.geomspace(1e-4, 1e-1, 16) if radii is None else np.asarray(radii, dtype=float)
    if rr.size < 8:
        raise InputError(f"need at least 8 radii, got {rr.size}")
    if np.any(rr <= 0):
        raise InputError("radii must be positive")
    dirs = sample_directions(f.n, seed)
    f0 = f(c)
    disp = np.empty(rr.size)
    for i, r in enumerate(rr):
        img = f(c + r * dirs)
        disp[i] = float(np.max(np.linalg.norm(img - f0, axis=-1)))
    if np.any(disp == 0) or not np.all(np.isfinite(disp)):
        bad = float(rr[np.argmin(np.where(np.isfinite(disp), disp, 0.0))])
        raise DegenerateFitError(f"f is constant on the sampled sphere of radius {bad}")
    x, y = np.log(rr), np.log(disp)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ExponentFit(tuple(c.tolist()), rr, disp, float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    worst_ratio: float
    samples: int


def check_certificate(f: BenchmarkMap, cert: HolderCertificate, levels: int = 24, seed: int = 0) -> CertificateCheck:
    """Compare measured displacements with ``C |x - x0|^alpha`` inside the validity radius.

    Radii are log-spaced over ``[1e-6, 1) * min(radius, 1)``; the check
    allows a relative headroom of 1e-9.
    """
    if cert.symbolic:
        raise InputError("symbolic certificates cannot be checked numerically")
    c = np.asarray(cert.center, dtype=float)
    top = min(cert.radius, 1.0)
    rr = top * np.geomspace(1e-6, 1.0 - 1e-9, levels)
    dirs = sample_directions(f.n, seed)
    f0 = f(c)
    worst, count, ok = 0.0, 0, True
    for r in rr:
        img = f(c + r * dirs)
        if cert.metric == "chordal":
            d = np.array([chordal_distance(p, f0) for p in img])
        else:
            d = np.linalg.norm(img - f0, axis=-1)
        b = float(cert.bound(r))
        ratio = float(np.max(d)) / b
        worst = max(worst, ratio)
        ok &= bool(np.all(d <= b * (1 + 1e-9)))
        count += len(d)
    return CertificateCheck(ok, worst, count)


# ---------------------------------------------------------------- ring inequality


def extremal_eta(r1: float, r2: float) -> Callable[[float], float]:
    """``1/(r log(r2/r1))``, the extremal admissible density of the ring."""
    if not 0 < r1 < r2:
        raise InputError(f"need 0 < r1 < r2, got ({r1}, {r2})")
    L = math.log(r2 / r1)
    return lambda r: 1.0 / (r * L)


@dataclass(frozen=True)
class RingCheck:
    lhs: float
    rhs: float
    holds: bool
    eta_integral: float

    @property
    def equality_gap(self) -> float:
        return abs(self.lhs - self.rhs) / max(abs(self.lhs), abs(self.rhs))


def verify_ring_inequality(
    f: BenchmarkMap,
    Q: ScalarField,
    r1: float,
    r2: float,
    eta: Optional[Callable[[float], float]] = None,
    x0=0,
    resolution: Optional[int] = None,
) -> RingCheck:
    """Image ring modulus against ``∫_{A(x0, r1, r2)} Q eta(|x - x0|)^n dm`` for radial maps.

    The image of the ring family of a radial map is the ring family of the
    image annulus, whose modulus is explicit; general maps are not supported.
    """
    if not f.is_radial:
        raise UnsupportedMapError("the ring inequality is only verified for radial maps")
    if Q.n != f.n:
        raise InputError(f"field dimension {Q.n} differs from map dimension {f.n}")
    c = _center(Q, x0)
    if np.any(c != 0):
        raise UnsupportedMapError("radial benchmarks are verified at their centre 0 only")
    if not 0 < r1 < r2:
        raise InputError(f"need 0 < r1 < r2, got ({r1}, {r2})")
    Q.require_ball(c, r2)
    eta = eta or extremal_eta(r1, r2)
    mass = log_radial_integral(lambda r: eta(r) * r, r1, r2)
    if mass < 1.0 - 1e-9:
        raise InputError(f"eta is not admissible: its integral over [r1, r2] is {mass:.12g} < 1")
    n = f.n
    lhs = ring_modulus(n, float(f.radial_profile(r1)), float(f.radial_profile(r2)))
    res = resolution or default_resolution(n)
    omega = sphere_area(n)
    rhs = log_radial_integral(lambda r: omega * _sphere_mean(Q, c, r, res, 0) * eta(r) ** n * r**n, r1, r2)
    return RingCheck(lhs, rhs, lhs <= rhs * (1 + 1e-9), mass)


# ---------------------------------------------------------------- Monte Carlo oracle


@dataclass(frozen=True)
class BallRegion:
    center: tuple
    radius: float

    @property
    def n(self) -> int:
        return len(self.center)

    def box(self):
        c = np.asarray(self.center, dtype=float)
        return c - self.radius, c + self.radius

    def contains(self, pts):
        return np.linalg.norm(pts - np.asarray(self.center), axis=-1) < self.radius

    def measure_ok(self) -> bool:
        return self.radius > 0


@dataclass(frozen=True)
class AnnulusRegion:
    center: tuple
    r1: float
    r2: float

    @property
    def n(self) -> int:
        return len(self.center)

    def box(self):
        c = np.asarray(self.center, dtype=float)
        return c - self.r2, c + self.r2

    def contains(self, pts):
        d = np.linalg.norm(pts - np.asarray(self.center), axis=-1)
        return (d > self.r1) & (d < self.r2)

    def measure_ok(self) -> bool:
        return 0 <= self.r1 < self.r2


@dataclass(frozen=True)
class LensRegion:
    """``D(zeta, eps) ∩ 𝔻`` (``inside``) or ``D(zeta, eps) \\ 𝔻`` in the plane."""

    zeta: complex
    eps: float
    inside: bool = True

    n = 2

    def box(self):
        c = np.array([self.zeta.real, self.zeta.imag])
        return c - self.eps, c + self.eps

    def contains(self, pts):
        c = np.array([self.zeta.real, self.zeta.imag])
        near = np.linalg.norm(pts - c, axis=-1) < self.eps
        unit = np.linalg.norm(pts, axis=-1) < 1.0
        return near & (unit if self.inside else ~unit)

    def measure_ok(self) -> bool:
        return self.eps > 0


Region = Union[BallRegion, AnnulusRegion, LensRegion]


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    stderr: float
    samples: int
    seed: int

    def agrees(self, other: float, rtol: float = 1e-4, n_se: float = 3.0) -> bool:
        return abs(other - self.value) <= max(rtol * abs(self.value), n_se * self.stderr)


def oracle_integral(
    field: Union[ScalarField, Callable[[np.ndarray], np.ndarray]],
    region: Region,
    samples: int = 200_000,
    seed: int = 0,
) -> OracleEstimate:
    """Uniform rejection sampling of ``∫_region field dm`` over the region's bounding box.

    ``field`` is a :class:`ScalarField` or any callable on ``(N, n)`` arrays.
    """
    if samples < 1000:
        raise InputError(f"oracle needs at least 1000 samples, got {samples}")
    if not region.measure_ok():
        raise InputError("region has zero measure")
    n = region.n
    if isinstance(field, ScalarField) and field.n != n:
        raise InputError(f"field dimension {field.n} differs from region dimension {n}")
    lo, hi = region.box()
    vol = float(np.prod(hi - lo))
    rng = np.random.default_rng(seed)
    pts = lo + (hi - lo) * rng.random((samples, n))
    mask = region.contains(pts)
    vals = np.zeros(samples)
    if np.any(mask):
        vals[mask] = np.asarray(field(pts[mask]), dtype=float)
    if np.any(np.isinf(vals)):
        return OracleEstimate(math.inf, math.inf, samples, seed)
    value = vol * float(vals.mean())
    stderr = vol * float(vals.std(ddof=1)) / math.sqrt(samples)
    return OracleEstimate(value, stderr, samples, seed)
