"""Spherical, ball and annulus means of dilatation fields.

Volume integrals are composed radially: an adaptive Simpson rule in the
radius (or in log r for the 1/|x|^n kernels) whose integrand is a sphere
quadrature of Q.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .doubling import DoublingFunction
from .errors import InputError
from .fields import ScalarField
from .geometry import sphere_area, sphere_quadrature
from .quadrature import adaptive_simpson, lens_integral

__all__ = [
    "FubiniResult",
    "MeanProfile",
    "annulus_weighted_integral",
    "ball_mean",
    "default_resolution",
    "fubini_radial_reduction",
    "half_disk_mean",
    "log_radial_integral",
    "mean_profile",
    "spherical_mean",
    "weighted_ball_mean",
]


def default_resolution(n: int) -> int:
    return {2: 256, 3: 48}.get(n, 4096)


def _center(Q: ScalarField, x0) -> np.ndarray:
    if np.isscalar(x0):
        if x0 != 0:
            raise InputError("a scalar center must be 0")
        return np.zeros(Q.n)
    c = np.asarray(x0, dtype=float).reshape(-1)
    if c.size != Q.n:
        raise InputError(f"center has dimension {c.size}, field has {Q.n}")
    return c


def _sphere_mean(Q: ScalarField, c: np.ndarray, r: float, resolution: int, seed: int) -> float:
    if r == 0:
        return Q.value(c)
    quad = sphere_quadrature(Q.n, c, r, resolution, seed)
    vals = Q(quad.nodes)
    if np.any(np.isinf(vals)):
        return math.inf
    return float(np.sum(quad.weights * vals) / np.sum(quad.weights))


def spherical_mean(Q: ScalarField, x0, r: float, resolution: Optional[int] = None, seed: int = 0) -> float:
    """Mean of Q over the sphere ``S(x0, r)`` with respect to surface measure."""
    if not r > 0:
        raise InputError(f"radius must be positive, got {r!r}")
    c = _center(Q, x0)
    Q.require_ball(c, r)
    return _sphere_mean(Q, c, r, resolution or default_resolution(Q.n), seed)


@dataclass(frozen=True)
class MeanProfile:
    center: tuple
    radii: np.ndarray
    values: np.ndarray
    resolution: int

    def __post_init__(self):
        if np.any(np.diff(self.radii) <= 0):
            raise InputError("profile radii must be strictly increasing")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "q"])
        for r, q in zip(self.radii, self.values):
            w.writerow([f"{r:.17g}", f"{q:.17g}"])
        return buf.getvalue()


def mean_profile(Q: ScalarField, x0, radii: Sequence[float], resolution: Optional[int] = None, seed: int = 0) -> MeanProfile:
    res = resolution or default_resolution(Q.n)
    rr = np.asarray(radii, dtype=float)
    vals = np.array([spherical_mean(Q, x0, float(r), res, seed) for r in rr])
    return MeanProfile(tuple(_center(Q, x0)), rr, vals, res)


def ball_mean(Q: ScalarField, x0, eps: float, resolution: Optional[int] = None, seed: int = 0) -> float:
    """``1/(Ω_n eps^n) ∫_{B(x0, eps)} Q dm`` as ``n ∫_0^1 q(eps u) u^{n-1} du``."""
    if not eps > 0:
        raise InputError(f"eps must be positive, got {eps!r}")
    c = _center(Q, x0)
    Q.require_ball(c, eps)
    res = resolution or default_resolution(Q.n)
    n = Q.n

    def g(u: float) -> float:
        if u == 0.0:
            return 0.0
        return _sphere_mean(Q, c, eps * u, res, seed) * u ** (n - 1)

    return n * adaptive_simpson(g, 0.0, 1.0).value


def weighted_ball_mean(
    Q: ScalarField, x0, eps: float, phi: DoublingFunction, resolution: Optional[int] = None, seed: int = 0
) -> float:
    """``phi(1/eps)/(Ω_n eps^n) ∫_{B(x0, eps)} Q dm``."""
    if not eps > 0:
        raise InputError(f"eps must be positive, got {eps!r}")
    if 1.0 / eps < phi.a * (1 - 1e-12):
        raise InputError(f"1/eps = {1 / eps} lies below the weight's domain start a = {phi.a}")
    m = ball_mean(Q, x0, eps, resolution, seed)
    w = float(phi(1.0 / eps))
    if w == 0.0:
        return 0.0
    return w * m


def half_disk_mean(K, zeta: complex, eps: float, order: int = 64) -> float:
    """``1/(π eps^2) ∫_{𝔻 ∩ D(zeta, eps)} K dm`` for ``|zeta| = 1``.

    ``K`` is a planar :class:`ScalarField` or a callable on complex arrays.
    The normalisation uses the full disk area.
    """
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise InputError(f"zeta must lie on the unit circle, |zeta| = {abs(zeta)!r}")
    if not 0 < eps < 1:
        raise InputError(f"eps must lie in (0, 1), got {eps!r}")
    func = _complex_callable(K)
    return lens_integral(func, zeta, eps, inside=True, order=order) / (math.pi * eps * eps)


def _complex_callable(K) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(K, ScalarField):
        if K.n != 2:
            raise InputError("planar means need a 2-dimensional field")

        def func(z: np.ndarray) -> np.ndarray:
            return K(np.stack([z.real, z.imag], axis=-1))

        return func
    return K


def log_radial_integral(g: Callable[[float], float], lo: float, hi: float, atol: float = 1e-10) -> float:
    """``∫_lo^hi g(r) dr / r`` by adaptive Simpson in s = log r."""
    if not 0 < lo <= hi:
        raise InputError(f"need 0 < lo <= hi, got ({lo}, {hi})")
    return adaptive_simpson(lambda s: g(math.exp(s)), math.log(lo), math.log(hi), atol=atol).value


def annulus_weighted_integral(
    Q: ScalarField,
    x0,
    eps: float,
    eps0: float,
    phi: Optional[DoublingFunction] = None,
    resolution: Optional[int] = None,
    seed: int = 0,
) -> float:
    """``∫_{eps<|x-x0|<eps0} phi(1/|x-x0|) Q(x) / |x-x0|^n dm``.

    Computed as ``∫_eps^eps0 phi(1/r) q(r) ω_{n-1} dr / r``.
    """
    if not 0 < eps < eps0:
        raise InputError(f"need 0 < eps < eps0, got ({eps}, {eps0})")
    c = _center(Q, x0)
    Q.require_ball(c, eps0)
    if phi is not None and 1.0 / eps0 < phi.a * (1 - 1e-12):
        raise InputError(f"1/eps0 = {1 / eps0} lies below the weight's domain start a = {phi.a}")
    res = resolution or default_resolution(Q.n)
    omega = sphere_area(Q.n)

    def g(r: float) -> float:
        q = _sphere_mean(Q, c, r, res, seed)
        w = 1.0 if phi is None else float(phi(1.0 / r))
        if w == 0.0:
            return 0.0
        return w * q * omega

    return log_radial_integral(g, eps, eps0)


@dataclass(frozen=True)
class FubiniResult:
    """Both sides of the polar-coordinates identity for ``(Q - 1)/|x|^n``."""

    volume: float
    radial: float
    volume_stderr: float
    method: str

    def agree(self, rtol: float = 1e-6, n_se: float = 3.0) -> bool:
        tol = max(rtol * max(abs(self.volume), abs(self.radial)), n_se * self.volume_stderr)
        return abs(self.volume - self.radial) <= tol


def _angular_product_rule(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit directions and solid-angle weights, built independently of sphere_quadrature."""
    if n == 2:
        phi = 2.0 * np.pi * (np.arange(m) + 0.5) / m
        return np.column_stack([np.cos(phi), np.sin(phi)]), np.full(m, 2.0 * np.pi / m)
    if n == 3:
        # theta midpoints with exact sin(theta) cell integrals
        edges = np.linspace(0.0, np.pi, m + 1)
        theta = 0.5 * (edges[:-1] + edges[1:])
        band = np.cos(edges[:-1]) - np.cos(edges[1:])
        k = 2 * m
        phi = 2.0 * np.pi * (np.arange(k) + 0.5) / k
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        dirs = np.column_stack(
            [(np.sin(tt) * np.cos(pp)).ravel(), (np.sin(tt) * np.sin(pp)).ravel(), np.cos(tt).ravel()]
        )
        return dirs, np.repeat(band, k) * (2.0 * np.pi / k)
    raise InputError("product volume rule is available for n = 2, 3; use method='mc'")


def fubini_radial_reduction(
    Q: ScalarField,
    x0,
    eps: float,
    eps0: float,
    resolution: Optional[int] = None,
    *,
    method: str = "product",
    samples: int = 400_000,
    seed: int = 0,
) -> FubiniResult:
    """Volume integral of ``(Q-1)/|x-x0|^n`` over the annulus and its radial form.

    The radial side is ``ω_{n-1} ∫ (q(r) - 1) dr / r`` through the spherical
    means.  The volume side never touches them: ``method="product"`` uses a
    tensor Gauss rule in log r times an angular product grid, ``"mc"``
    rejection-samples the bounding box of the outer ball.
    """
    if not 0 < eps < eps0:
        raise InputError(f"need 0 < eps < eps0, got ({eps}, {eps0})")
    c = _center(Q, x0)
    Q.require_ball(c, eps0)
    n = Q.n
    res = resolution or default_resolution(n)
    omega = sphere_area(n)
    radial = log_radial_integral(lambda r: (_sphere_mean(Q, c, r, res, seed) - 1.0) * omega, eps, eps0)

    def integrand(pts: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(pts - c, axis=-1)
        return (Q(pts) - 1.0) / d**n

    if method == "product":
        s, ws = np.polynomial.legendre.leggauss(96)
        lo, hi = math.log(eps), math.log(eps0)
        s = lo + 0.5 * (hi - lo) * (s + 1.0)
        ws = 0.5 * (hi - lo) * ws
        dirs, wd = _angular_product_rule(n, 128 if n == 2 else 64)
        r = np.exp(s)
        pts = c + r[:, None, None] * dirs[None, :, :]
        vals = integrand(pts)
        # dm = r^{n-1} dr dS = r^n ds dS
        vol = float(np.einsum("i,ij,j->", ws * r**n, vals, wd))
        return FubiniResult(vol, radial, 0.0, "product")
    if method == "mc":
        rng = np.random.default_rng(seed)
        box = (2.0 * eps0) ** n
        pts = c + rng.uniform(-eps0, eps0, size=(samples, n))
        d = np.linalg.norm(pts - c, axis=-1)
        inside = (d > eps) & (d < eps0)
        vals = np.zeros(samples)
        vals[inside] = integrand(pts[inside])
        if np.any(np.isinf(vals)):
            return FubiniResult(math.inf, radial, math.inf, "mc")
        vol = box * float(vals.mean())
        se = box * float(vals.std(ddof=1)) / math.sqrt(samples)
        return FubiniResult(vol, radial, se, "mc")
    raise InputError(f"unknown volume method {method!r}")


