"""Planar Beltrami coefficients, Wirtinger derivatives and reflection across the unit circle.

Complex dilatation is computed as ``mu_f = f_zbar / f_z`` (zero where
``f_z`` vanishes), the standard convention under which the maximal
dilatation of the radial stretch ``z |z|^{a-1}`` is ``1/a``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import DomainError, FieldSpecError, GridFormatError, InputError, Refusal
from .fields import ScalarField, _parse_float, _read_lattice, split_spec
from .quadrature import disk_polar_integral, lens_integral

__all__ = [
    "BeltramiCoefficient",
    "MassBound",
    "PlanarMap",
    "ReflectedMap",
    "annulus_mass_bound",
    "coefficient_of_map",
    "inversion_weight_max",
    "jacobian",
    "max_dilatation",
    "parse_mu_spec",
    "parse_planar_map_spec",
    "planar_identity",
    "planar_radial_stretch",
    "planar_scale",
    "reflect_coefficient",
    "reflect_map",
    "reflected_mass_bound",
    "wirtinger_derivatives",
]

DEFAULT_STEP = 1e-6


def max_dilatation(mu_value):
    """``(1 + |mu|)/(1 - |mu|)``; ``+inf`` once ``|mu| >= 1``.  Works elementwise."""
    m = np.abs(np.asarray(mu_value))
    with np.errstate(divide="ignore"):
        k = np.where(m >= 1.0, np.inf, (1.0 + m) / (1.0 - np.minimum(m, 1.0)))
    return float(k) if k.ndim == 0 else k


def _sample_disk(m: int = 24) -> np.ndarray:
    r = (np.arange(m) + 0.5) / m
    t = 2.0 * np.pi * np.arange(2 * m) / (2 * m)
    return (r[:, None] * np.exp(1j * t)[None, :]).ravel()


class BeltramiCoefficient:
    """Complex dilatation on the open unit disk, validated as ``|mu| < 1`` on samples."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], kind: str = "custom", params: Optional[dict] = None):
        self._func = func
        self.kind = kind
        self.params = dict(params or {})
        vals = np.abs(self(_sample_disk()))
        if np.any(~np.isfinite(vals)) or np.any(vals >= 1.0):
            raise InputError(f"Beltrami coefficient {kind!r} reaches |mu| >= 1 inside the disk")

    def __call__(self, z) -> np.ndarray:
        zz = np.asarray(z, dtype=complex)
        return np.asarray(self._func(zz), dtype=complex)

    def K(self, z) -> np.ndarray:
        return max_dilatation(self(z))

    def reflected_K(self, z) -> np.ndarray:
        """Maximal dilatation of the reflected coefficient at ``|z| > 1``."""
        return max_dilatation(reflect_coefficient(self, z))

    def as_field(self) -> ScalarField:
        """K_mu as a planar :class:`ScalarField` on the unit disk."""
        return ScalarField(
            2, f"K[{self.kind}]", lambda x: self.K(x[..., 0] + 1j * x[..., 1]), params=self.params, domain_radius=1.0
        )

    @classmethod
    def constant(cls, c: complex) -> "BeltramiCoefficient":
        c = complex(c)
        return cls(lambda z: np.full(z.shape, c, dtype=complex), "mu-const", {"re": c.real, "im": c.imag})

    @classmethod
    def radial(cls, a: float) -> "BeltramiCoefficient":
        """Coefficient of the radial stretch: ``((a-1)/(1+a)) z / conj(z)``."""
        if not 0 < a <= 1:
            raise InputError(f"radial exponent must lie in (0, 1], got {a}")
        k = (a - 1.0) / (1.0 + a)

        def func(z):
            with np.errstate(invalid="ignore", divide="ignore"):
                u = z / np.conj(z)
            return k * np.where(z == 0, 1.0, u)

        return cls(func, "mu-radial", {"a": a})

    def __repr__(self) -> str:
        return f"BeltramiCoefficient({self.kind!r}, {self.params})"


_MU_FAMILIES = {"mu-const": ("re", "im"), "mu-radial": ("a",), "mu-grid": ("path",)}


def parse_mu_spec(text: str) -> BeltramiCoefficient:
    """``mu-const re im``, ``mu-radial a`` or ``mu-grid path`` (CSV ``x1,x2,re,im``)."""
    family, raw, off = split_spec(text, _MU_FAMILIES, common=frozenset())
    if family == "mu-const":
        re_, im_ = (_parse_float(raw[k], off[k], k) for k in ("re", "im"))
        try:
            return BeltramiCoefficient.constant(complex(re_, im_))
        except InputError as exc:
            raise FieldSpecError(str(exc), off["re"]) from None
    if family == "mu-radial":
        a = _parse_float(raw["a"], off["a"], "a")
        try:
            return BeltramiCoefficient.radial(a)
        except InputError as exc:
            raise FieldSpecError(str(exc), off["a"]) from None
    return load_mu_grid(raw["path"])


def load_mu_grid(path) -> BeltramiCoefficient:
    axes, values, _ = _read_lattice(Path(path), 2, ["re", "im"])
    if len(axes) != 2:
        raise GridFormatError("mu lattices are planar", 0)
    interp = RegularGridInterpolator(tuple(axes), values, method="linear", bounds_error=False, fill_value=None)

    def func(z):
        pts = np.stack([z.real, z.imag], axis=-1).reshape(-1, 2)
        v = interp(pts)
        return (v[:, 0] + 1j * v[:, 1]).reshape(z.shape)

    return BeltramiCoefficient(func, "mu-grid", {"path": str(path)})


# ---------------------------------------------------------------- maps and derivatives


@dataclass(frozen=True)
class PlanarMap:
    """Complex-valued map on ``D(0, domain_radius)``, optionally minus the origin."""

    func: Callable[[np.ndarray], np.ndarray]
    kind: str = "custom"
    a: float = 1.0
    domain_radius: float = math.inf
    punctured: bool = False

    def __call__(self, z):
        zz = np.asarray(z, dtype=complex)
        out = np.asarray(self.func(zz), dtype=complex)
        return complex(out) if out.ndim == 0 else out

    def in_domain(self, z) -> np.ndarray:
        zz = np.asarray(z, dtype=complex)
        ok = np.abs(zz) < self.domain_radius
        if self.punctured:
            ok &= zz != 0
        return ok


def planar_identity() -> PlanarMap:
    return PlanarMap(lambda z: z.copy(), "identity")


def planar_scale(c: complex) -> PlanarMap:
    return PlanarMap(lambda z: c * z, "scale", a=abs(c))


def planar_radial_stretch(a: float) -> PlanarMap:
    """``z |z|^{a-1}`` with ``0 -> 0``; fixes the unit circle pointwise."""
    if not 0 < a <= 1:
        raise InputError(f"radial exponent must lie in (0, 1], got {a}")

    def func(z):
        r = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = z * np.power(r, a - 1.0)
        return np.where(r == 0, 0.0, out)

    return PlanarMap(func, "radial", a=a)


def parse_planar_map_spec(text: str) -> PlanarMap:
    """``identity``, ``conj``, ``radial:<a>`` or ``scale:<c>`` (c real or Python complex literal)."""
    kind, _, arg = text.strip().partition(":")
    try:
        if kind == "identity" and not arg:
            return planar_identity()
        if kind == "conj" and not arg:
            return PlanarMap(lambda z: np.conj(z), "conj")
        if kind == "radial":
            return planar_radial_stretch(float(arg))
        if kind == "scale":
            return planar_scale(complex(arg.replace(" ", "")))
    except ValueError:
        raise FieldSpecError(f"malformed map argument {arg!r}", len(kind) + 1) from None
    raise FieldSpecError(f"unknown planar map {text!r}; expected identity, conj, radial:<a> or scale:<c>", 0)


def _central(f: PlanarMap, z: complex, h: float) -> tuple[complex, complex]:
    stencil = np.array([z + h, z - h, z + 1j * h, z - 1j * h])
    if not np.all(f.in_domain(stencil)):
        raise DomainError(f"finite-difference stencil of size {h} around {z} leaves the map's domain")
    v = f(stencil)
    fx = (v[0] - v[1]) / (2 * h)
    fy = (v[2] - v[3]) / (2 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def wirtinger_derivatives(f: PlanarMap, z: complex, h: float = DEFAULT_STEP, check: bool = True) -> tuple[complex, complex]:
    """``(f_z, f_zbar)`` from central differences of ``f_x`` and ``f_y``.

    With ``check`` the step is compared against ``h/2`` and a
    ``RuntimeWarning`` is issued when they disagree beyond 1e-5 relative.
    """
    if not h > 0:
        raise InputError(f"step must be positive, got {h}")
    z = complex(z)
    fz, fzb = _central(f, z, h)
    fz, fzb = complex(fz), complex(fzb)
    if check:
        gz, gzb = _central(f, z, h / 2)
        scale = max(abs(fz), abs(fzb), 1e-300)
        if max(abs(fz - gz), abs(fzb - gzb)) > 1e-5 * scale:
            warnings.warn(f"finite differences at {z} are not converged for h={h}", RuntimeWarning, stacklevel=2)
    return fz, fzb


def coefficient_of_map(f: PlanarMap, z: complex, h: float = DEFAULT_STEP) -> complex:
    """``f_zbar / f_z``, or 0 where ``|f_z| < 1e-12``."""
    fz, fzb = wirtinger_derivatives(f, z, h)
    if abs(fz) < 1e-12:
        return 0j
    return fzb / fz


def jacobian(f: PlanarMap, z: complex, h: float = DEFAULT_STEP) -> float:
    """``|f_z|^2 - |f_zbar|^2``."""
    fz, fzb = wirtinger_derivatives(f, z, h)
    return abs(fz) ** 2 - abs(fzb) ** 2


# ---------------------------------------------------------------- reflection


def reflect_coefficient(mu, z):
    """``(z^2 / conj(z)^2) conj(mu(1/conj(z)))`` for ``|z| > 1``."""
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) <= 1.0):
        raise InputError("reflect_coefficient needs |z| > 1")
    w = 1.0 / np.conj(zz)
    out = (zz * zz) / (np.conj(zz) ** 2) * np.conj(np.asarray(mu(w), dtype=complex))
    return complex(out) if out.ndim == 0 else out


class ReflectedMap(PlanarMap):
    """``F = f`` on the closed disk and ``1/conj(f(1/conj(z)))`` outside."""

    inner: PlanarMap

    @classmethod
    def of(cls, f: PlanarMap) -> "ReflectedMap":
        def func(z):
            z = np.asarray(z, dtype=complex)
            out = np.empty(z.shape, dtype=complex)
            inside = np.abs(z) <= 1.0
            if np.any(inside):
                out[inside] = f(z[inside])
            if np.any(~inside):
                zo = z[~inside]
                out[~inside] = 1.0 / np.conj(f(1.0 / np.conj(zo)))
            return out

        obj = cls(func, f"reflected[{f.kind}]", f.a, math.inf, True)
        object.__setattr__(obj, "inner", f)
        return obj

    def check_invariants(self, samples: int = 200, seed: int = 0, tol: float = 1e-9) -> dict:
        """Reflection identity off the circle and continuity across it, on random samples."""
        rng = np.random.default_rng(seed)
        r = rng.uniform(0.05, 0.95, samples)
        t = rng.uniform(0, 2 * np.pi, samples)
        z = r * np.exp(1j * t)
        ident = np.max(np.abs(self(1.0 / np.conj(z)) - 1.0 / np.conj(self(z))) / np.maximum(1.0, np.abs(self(1.0 / np.conj(z)))))
        zeta = np.exp(1j * t)
        jump = max(
            float(np.max(np.abs(self(zeta * (1 + 1e-8)) - self(zeta)))),
            float(np.max(np.abs(self(zeta * (1 - 1e-8)) - self(zeta)))),
        )
        return {"reflection_error": float(ident), "boundary_jump": jump, "ok": bool(ident <= tol and jump <= 1e-6)}


def reflect_map(f: PlanarMap, samples: int = 24) -> ReflectedMap:
    """Extend a self-map of the unit disk by symmetry across the circle."""
    z = _sample_disk(samples)
    if np.any(np.abs(f(z)) >= 1.0):
        raise InputError("reflect_map needs f to map the disk into itself")
    return ReflectedMap.of(f)


# ---------------------------------------------------------------- reflection inequalities


class InversionWeight(NamedTuple):
    sampled_max: float
    bound: float
    argmax_angle: float


def inversion_weight_max(eps: float, zeta: complex = 1.0, samples: int = 3600) -> InversionWeight:
    """Sampled ``max |zeta + eps e^{i phi}|^{-2}`` against ``1/(1-eps)^2``.

    The angular grid contains ``phi = arg(zeta) + pi``, where the circle comes
    closest to the origin.
    """
    if not 0 < eps < 0.5:
        raise InputError(f"eps must lie in (0, 1/2), got {eps}")
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise InputError("zeta must lie on the unit circle")
    theta = math.atan2(zeta.imag, zeta.real)
    phi = theta + math.pi + 2.0 * np.pi * np.arange(samples) / samples
    w = zeta + eps * np.exp(1j * phi)
    vals = 1.0 / np.abs(w) ** 2
    k = int(np.argmax(vals))
    return InversionWeight(float(vals[k]), 1.0 / (1.0 - eps) ** 2, float(math.remainder(phi[k], 2 * math.pi)))


class MassBound(NamedTuple):
    lhs: float
    rhs: float
    holds: bool

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else math.inf


def reflected_mass_bound(mu: BeltramiCoefficient, zeta: complex, eps: float, order: int = 64) -> MassBound:
    """``∫_{D(zeta,eps)} K_{mu_F}`` against ``17 ∫_{D(zeta,eps) ∩ 𝔻} K_mu``.

    The left side is integrated directly over the whole disk about zeta,
    reflected coefficient outside the unit circle included.
    """
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise InputError("zeta must lie on the unit circle")
    if not 0 < eps < 0.5:
        raise InputError(f"eps must lie in (0, 1/2), got {eps}")
    inner = lens_integral(mu.K, zeta, eps, inside=True, order=order)
    outer = lens_integral(mu.reflected_K, zeta, eps, inside=False, order=order)
    lhs, rhs = inner + outer, 17.0 * inner
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        raise Refusal("K_mu is not integrable on the lens at this resolution", (lhs, rhs))
    return MassBound(lhs, rhs, lhs < rhs)


def annulus_mass_bound(mu: BeltramiCoefficient, R: float, order: int = 64) -> MassBound:
    """``∫_{1<=|z|<=R} K_{mu_F}`` against ``R^4 ∫_𝔻 K_mu``."""
    if not R > 1:
        raise InputError(f"R must exceed 1, got {R}")
    lhs = disk_polar_integral(mu.reflected_K, 1.0, R, order=order)
    disk = disk_polar_integral(mu.K, 0.0, 1.0, order=order)
    rhs = R**4 * disk
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        raise Refusal("K_mu is not integrable at this resolution", (lhs, rhs))
    return MassBound(lhs, rhs, lhs <= rhs * (1 + 1e-12))
