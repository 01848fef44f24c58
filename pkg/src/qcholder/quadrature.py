"""One-dimensional adaptive Simpson and planar polar rules used by the means.

The planar rules integrate over a disk ``D(zeta, eps)`` split by the unit
circle.  For ``|zeta| = 1`` the circle ``|w - zeta| = rho`` lies inside the
unit disk exactly on the arc of half-width ``arccos(rho/2)`` centred at the
direction pointing back to the origin, so the clipping is exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "SimpsonResult",
    "adaptive_simpson",
    "disk_polar_integral",
    "lens_area",
    "lens_integral",
]

DEFAULT_ATOL = 1e-10
DEFAULT_MAX_EVALS = 2**20
_MAX_DEPTH = 60


@dataclass(frozen=True)
class SimpsonResult:
    value: float
    evaluations: int
    converged: bool


def _clean(vals: list[float]) -> list[float] | None:
    """Replace isolated +inf samples by their finite neighbours' mean.

    Returns None when two adjacent samples are +inf (a set of positive
    measure at the available resolution).
    """
    out = list(vals)
    for i, v in enumerate(vals):
        if v == math.inf:
            left = vals[i - 1] if i > 0 else None
            right = vals[i + 1] if i + 1 < len(vals) else None
            if left == math.inf or right == math.inf:
                return None
            finite = [u for u in (left, right) if u is not None]
            out[i] = sum(finite) / len(finite)
    return out


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    atol: float = DEFAULT_ATOL,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> SimpsonResult:
    """Integrate a scalar function on [a, b] by adaptive Simpson.

    Panels are accepted when ``|S_left + S_right - S| <= 15 tol`` with the
    tolerance halved at each split.  When the evaluation budget runs out the
    remaining panels are accepted as they stand and ``converged`` is False.
    Two adjacent +inf samples make the integral +inf.
    """
    if a == b:
        return SimpsonResult(0.0, 0, True)
    if a > b:
        r = adaptive_simpson(f, b, a, atol, max_evals)
        return SimpsonResult(-r.value, r.evaluations, r.converged)

    m = 0.5 * (a + b)
    fa, fm, fb = float(f(a)), float(f(m)), float(f(b))
    evals = 3
    clean = _clean([fa, fm, fb])
    if clean is None:
        return SimpsonResult(math.inf, evals, True)
    whole = (b - a) / 6.0 * (clean[0] + 4 * clean[1] + clean[2])

    total = 0.0
    converged = True
    stack = [(a, m, b, fa, fm, fb, whole, atol, 0)]
    while stack:
        a0, m0, b0, fa0, fm0, fb0, s0, tol, depth = stack.pop()
        if evals + 2 > max_evals or depth >= _MAX_DEPTH:
            converged = False
            total += s0
            continue
        lm, rm = 0.5 * (a0 + m0), 0.5 * (m0 + b0)
        flm, frm = float(f(lm)), float(f(rm))
        evals += 2
        clean = _clean([fa0, flm, fm0, frm, fb0])
        if clean is None:
            return SimpsonResult(math.inf, evals, True)
        ca, clm, cm, crm, cb = clean
        left = (m0 - a0) / 6.0 * (ca + 4 * clm + cm)
        right = (b0 - m0) / 6.0 * (cm + 4 * crm + cb)
        delta = left + right - s0
        if not math.isfinite(delta):
            # -inf samples: the panel is -inf whatever the refinement
            total += left + right
            continue
        if abs(delta) <= 15.0 * tol:
            total += left + right + delta / 15.0
        else:
            stack.append((m0, rm, b0, fm0, frm, fb0, right, tol / 2, depth + 1))
            stack.append((a0, lm, m0, fa0, flm, fm0, left, tol / 2, depth + 1))
    if not converged:
        warnings.warn(
            f"adaptive Simpson on [{a}, {b}] stopped after {evals} evaluations without reaching atol={atol}",
            RuntimeWarning,
            stacklevel=2,
        )
    return SimpsonResult(total, evals, converged)


def _gauss(order: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def lens_integral(
    func: Callable[[np.ndarray], np.ndarray],
    zeta: complex,
    eps: float,
    inside: bool = True,
    order: int = 64,
) -> float:
    """Integral of ``func`` over ``D(zeta, eps) ∩ 𝔻`` (or the part outside 𝔻).

    ``zeta`` must lie on the unit circle; ``func`` takes a complex array.
    Gauss-Legendre in the radius about zeta times Gauss-Legendre on the
    exactly clipped arc.
    """
    theta = math.atan2(zeta.imag, zeta.real)
    rho, wr = _gauss(order, 0.0, eps)
    u, wu = np.polynomial.legendre.leggauss(order)
    beta = np.arccos(rho / 2.0)
    if inside:
        half = beta
        mid = theta + math.pi
    else:
        half = math.pi - beta
        mid = theta
    ang = mid + half[:, None] * u[None, :]
    pts = zeta + rho[:, None] * np.exp(1j * ang)
    vals = np.asarray(func(pts), dtype=float)
    if np.any(np.isnan(vals)):
        return math.nan
    inner = (vals * wu[None, :]).sum(axis=1) * half
    return float(np.dot(wr * rho, inner))


def lens_area(eps: float) -> float:
    """Area of ``D(zeta, eps) ∩ 𝔻`` for ``|zeta| = 1`` (circle-circle intersection)."""
    return (
        eps * eps * math.acos(eps / 2.0)
        + math.acos(1.0 - eps * eps / 2.0)
        - 0.5 * math.sqrt(eps * eps * (4.0 - eps * eps))
    )


def disk_polar_integral(
    func: Callable[[np.ndarray], np.ndarray],
    r_lo: float,
    r_hi: float,
    order: int = 64,
    n_angles: int = 256,
    center: complex = 0.0,
) -> float:
    """Integral of ``func`` over the planar annulus ``r_lo <= |z - center| <= r_hi``."""
    r, wr = _gauss(order, r_lo, r_hi)
    phi = 2.0 * np.pi * (np.arange(n_angles) + 0.5) / n_angles
    pts = center + r[:, None] * np.exp(1j * phi)[None, :]
    vals = np.asarray(func(pts), dtype=float)
    if np.any(np.isnan(vals)):
        return math.nan
    ring = vals.mean(axis=1) * 2.0 * np.pi
    return float(np.dot(wr * r, ring))
