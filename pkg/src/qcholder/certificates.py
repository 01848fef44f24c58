"""Integral conditions on the dilatation and explicit Hölder certificates.

A condition of the form ``limsup_{t->0} F(t) < inf`` is evaluated on the
geometric grid ``t_k = eps0 2^-k, k = 1..40``.  The estimate is the maximum
of the last ten values; the verdict is ``holds`` only when that estimate is
finite and the last three values agree within 1 %, or when the tail is
nonincreasing (a sequence drifting to -inf has a finite limsup).  Sup-type conditions use
the maximum over the whole grid with the same stabilisation rule.

Certificates carry every constant of their pipeline together with the
formula that produced it, so a JSON dump is self-explaining.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .doubling import DoublingCheck, DoublingFunction, check_doubling
from .errors import InputError, Refusal
from .fields import ScalarField
from .geometry import ball_volume, complement_ball_chordal_diameter, sphere_area
from .means import (
    _center,
    _sphere_mean,
    annulus_weighted_integral,
    ball_mean,
    default_resolution,
    half_disk_mean,
    log_radial_integral,
    weighted_ball_mean,
)

__all__ = [
    "BoundaryCertificate",
    "BoundLedger",
    "ConditionReport",
    "Constant",
    "DoublingCheck",
    "DoublingFunction",
    "HolderCertificate",
    "ball_mean_certificate",
    "ball_mean_condition",
    "bernoulli_holds",
    "boundary_condition",
    "boundary_holder_certificate",
    "check_doubling",
    "cor3_certificate",
    "dini_condition",
    "fmv_integral_condition",
    "holder_certificate_interior",
    "integrand_comparison",
    "integrand_comparison_array",
    "lemma31_bound",
    "lemma42_bound",
    "limsup_grid",
    "prop3_distortion",
    "weighted_ball_condition",
]

# alpha_n in the interior distortion estimate for n = 2: the planar
# distortion lemma for ring Q-homeomorphisms has the explicit factor 32.
DEFAULT_ALPHA_2 = 32.0

CONDITIONS = ("dini", "lipschitz", "fmv", "ball_mean", "weighted_ball_mean", "boundary")

_BOUND_RTOL = 1e-9


def limsup_grid(eps0: float, k: int = 40) -> np.ndarray:
    """``eps0 2^-j`` for j = 1..k, decreasing."""
    return eps0 * np.exp2(-np.arange(1, k + 1, dtype=float))


def _stabilized(values: np.ndarray) -> bool:
    tail = values[-3:]
    if not np.all(np.isfinite(tail)):
        return False
    spread = float(tail.max() - tail.min())
    return spread <= 0.01 * float(np.max(np.abs(tail))) or spread <= 1e-12


def _nonincreasing(values: np.ndarray) -> bool:
    """Tail that only moves down: its limsup is bounded by the current values."""
    tail = values[-6:]
    if not np.all(np.isfinite(tail)):
        return False
    return bool(np.all(np.diff(tail) <= 1e-12 * np.maximum(1.0, np.abs(tail[:-1]))))


def _diverging(values: np.ndarray) -> bool:
    tail = values[-6:]
    inc = np.diff(tail)
    return bool(np.all(inc > 0) and inc[-1] >= 0.5 * inc[0])


@dataclass
class ConditionReport:
    """Verdict and numeric evidence for one integral condition."""

    condition: str
    estimate: float
    verdict: str
    grid: np.ndarray
    values: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise InputError(f"unknown condition id {self.condition!r}")
        if self.verdict not in ("holds", "fails", "inconclusive"):
            raise InputError(f"unknown verdict {self.verdict!r}")

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(self.grid, self.values):
            w.writerow([_fmt(t), _fmt(v)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "estimate": self.estimate,
            "verdict": self.verdict,
            "params": self.params,
            "grid": [float(t) for t in self.grid],
            "values": [float(v) for v in self.values],
        }


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _judge(condition: str, grid, values, params, *, tail: bool = True) -> ConditionReport:
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    pool = values[-10:] if tail else values
    estimate = float(np.max(pool))
    if math.isnan(estimate):
        verdict = "inconclusive"
    elif estimate == math.inf:
        verdict = "fails"
    elif _stabilized(values) or _nonincreasing(values):
        verdict = "holds"
    elif _diverging(values):
        verdict = "fails"
    else:
        verdict = "inconclusive"
    return ConditionReport(condition, estimate, verdict, grid, values, params)


def _check_grid(grid, eps0: float) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 3:
        raise InputError("grids need at least three points")
    if np.any(g <= 0) or np.any(g >= eps0) or np.any(np.diff(g) >= 0):
        raise InputError("grid must be positive, below eps0 and strictly decreasing")
    return g


def _cumulative_from_eps0(g: Callable[[float], float], eps0: float, grid: np.ndarray) -> np.ndarray:
    """``∫_t^eps0 g(r) dr/r`` for every t in a decreasing grid, piece by piece."""
    out = np.empty(grid.size)
    acc = 0.0
    hi = eps0
    for i, t in enumerate(grid):
        acc += log_radial_integral(g, float(t), hi)
        out[i] = acc
        hi = float(t)
    return out


# ---------------------------------------------------------------- conditions


def _require_eps0(Q: ScalarField, c, eps0: float) -> None:
    if not eps0 > 0 or not Q.contains_ball(c, eps0):
        raise InputError(f"eps0 = {eps0} must be positive and keep B(x0, eps0) inside the field domain")


def dini_condition(
    Q: ScalarField,
    x0,
    alpha: float,
    eps0: float,
    t_grid: Optional[Sequence[float]] = None,
    resolution: Optional[int] = None,
) -> ConditionReport:
    """``limsup_{t->0} ∫_t^eps0 (alpha - q(r)^{-1/(n-1)}) dr/r < inf``.

    ``alpha = 1`` is the pointwise Lipschitz variant.
    """
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha}")
    c = _center(Q, x0)
    _require_eps0(Q, c, eps0)
    grid = limsup_grid(eps0) if t_grid is None else _check_grid(t_grid, eps0)
    n = Q.n
    res = resolution or default_resolution(n)

    def g(r: float) -> float:
        q = _sphere_mean(Q, c, r, res, 0)
        if q == 0:
            return -math.inf
        if q == math.inf:
            return alpha
        return alpha - q ** (-1.0 / (n - 1))

    values = _cumulative_from_eps0(g, eps0, grid)
    cond = "lipschitz" if alpha == 1 else "dini"
    return _judge(cond, grid, values, {"alpha": alpha, "eps0": eps0, "center": c.tolist(), "n": n})


def fmv_integral_condition(
    Q: ScalarField,
    eps0: float,
    r_grid: Optional[Sequence[float]] = None,
    x0=0,
    resolution: Optional[int] = None,
) -> ConditionReport:
    """``limsup_{r->0} ∫_{r<|x-x0|<eps0} (Q-1)/|x-x0|^n dm < inf`` via its radial form."""
    c = _center(Q, x0)
    _require_eps0(Q, c, eps0)
    grid = limsup_grid(eps0) if r_grid is None else _check_grid(r_grid, eps0)
    res = resolution or default_resolution(Q.n)
    omega = sphere_area(Q.n)
    values = _cumulative_from_eps0(lambda r: (_sphere_mean(Q, c, r, res, 0) - 1.0) * omega, eps0, grid)
    return _judge("fmv", grid, values, {"eps0": eps0, "center": c.tolist(), "n": Q.n})


def ball_mean_condition(
    Q: ScalarField, x0, eps0: float, eps_grid: Optional[Sequence[float]] = None, resolution: Optional[int] = None
) -> ConditionReport:
    """``limsup_{eps->0}`` of the ball mean of Q."""
    c = _center(Q, x0)
    _require_eps0(Q, c, eps0)
    grid = limsup_grid(eps0) if eps_grid is None else _check_grid(eps_grid, eps0)
    values = [ball_mean(Q, c, float(e), resolution) for e in grid]
    return _judge("ball_mean", grid, values, {"eps0": eps0, "center": c.tolist(), "n": Q.n})


def weighted_ball_condition(
    Q: ScalarField,
    x0,
    phi: DoublingFunction,
    eps0: float,
    eps_grid: Optional[Sequence[float]] = None,
    resolution: Optional[int] = None,
) -> ConditionReport:
    """``limsup_{eps->0} phi(1/eps)`` times the ball mean of Q."""
    c = _center(Q, x0)
    _require_eps0(Q, c, eps0)
    grid = limsup_grid(eps0) if eps_grid is None else _check_grid(eps_grid, eps0)
    values = [weighted_ball_mean(Q, c, float(e), phi, resolution) for e in grid]
    return _judge(
        "weighted_ball_mean", grid, values, {"eps0": eps0, "center": c.tolist(), "n": Q.n, "phi": phi.describe()}
    )


def boundary_condition(
    K,
    eps0: float,
    zetas: Optional[Sequence[complex]] = None,
    eps_grid: Optional[Sequence[float]] = None,
) -> ConditionReport:
    """``sup_{eps<eps0}`` of the half-disk mean of K, maximised over boundary points.

    ``values[k]`` is the maximum over ``zetas`` at ``eps_grid[k]``.
    """
    if not 0 < eps0 < 1:
        raise InputError(f"eps0 must lie in (0, 1), got {eps0}")
    if zetas is None:
        zetas = np.exp(2j * np.pi * np.arange(16) / 16)
    grid = limsup_grid(eps0, 24) if eps_grid is None else _check_grid(eps_grid, eps0)
    values = [max(half_disk_mean(K, complex(z), float(e)) for z in zetas) for e in grid]
    return _judge("boundary", grid, values, {"eps0": eps0, "boundary_points": len(zetas)}, tail=False)


# ---------------------------------------------------------------- pointwise inequalities


def integrand_comparison(q: float, n: int) -> tuple[float, float]:
    """``(1 - q^{-1/(n-1)}, (q-1)/(n-1))``; the first never exceeds the second.

    ``q = 0`` gives ``(-inf, -1/(n-1))`` (the comparison is vacuous there) and
    ``q = +inf`` gives ``(1, +inf)``.
    """
    if n < 2:
        raise InputError(f"n must be >= 2, got {n}")
    if not q >= 0:
        raise InputError(f"q must be in [0, +inf], got {q!r}")
    if q == 0:
        return -math.inf, -1.0 / (n - 1)
    if q == math.inf:
        return 1.0, math.inf
    return -math.expm1(-math.log(q) / (n - 1)), (q - 1.0) / (n - 1)


def integrand_comparison_array(q: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`integrand_comparison` for finite positive q."""
    q = np.asarray(q, dtype=float)
    return -np.expm1(-np.log(q) / (n - 1)), (q - 1.0) / (n - 1)


def bernoulli_holds(lam, n) -> np.ndarray:
    """``(1+lam)^n >= 1 + n lam`` up to one ulp of the right side."""
    lam = np.asarray(lam, dtype=float)
    n = np.asarray(n)
    lhs = np.power(1.0 + lam, n)
    rhs = 1.0 + n * lam
    return lhs >= rhs - np.spacing(np.abs(rhs))


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class Constant:
    name: str
    value: Optional[float]
    formula: str


@dataclass
class HolderCertificate:
    """``dist(f(x), f(x0)) <= constant |x - x0|^exponent`` for ``|x - x0| < radius``.

    ``metric`` names the distance on the target side (``euclidean`` or
    ``chordal``).  Symbolic certificates (dimension >= 3 ball-mean pipeline)
    carry ``None`` for the unresolved exponent and constant.
    """

    center: list
    exponent: Optional[float]
    constant: Optional[float]
    radius: float
    source: str
    metric: str = "euclidean"
    raw_exponent: Optional[float] = None
    symbolic: bool = False
    provenance: list = field(default_factory=list)

    def __post_init__(self):
        if not self.symbolic:
            if self.exponent is None or not 0 < self.exponent <= 1:
                raise InputError(f"certificate exponent must lie in (0, 1], got {self.exponent}")
            if self.constant is None or not self.constant > 0:
                raise InputError(f"certificate constant must be positive, got {self.constant}")
        if not self.radius > 0:
            raise InputError(f"certificate radius must be positive, got {self.radius}")

    def bound(self, dist):
        """Right-hand side ``constant * dist^exponent``."""
        if self.symbolic:
            raise InputError("symbolic certificates have no numeric bound")
        return self.constant * np.power(dist, self.exponent)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["provenance"] = [asdict(c) for c in self.provenance]
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict())


def dumps(obj) -> str:
    """JSON with 17-significant-digit floats and non-finite values as strings."""
    return json.dumps(_round_trip(obj), indent=2, sort_keys=False, allow_nan=False)


def _round_trip(obj):
    if isinstance(obj, dict):
        return {k: _round_trip(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_trip(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_round_trip(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return _Float17(x)
    if isinstance(obj, complex):
        return {"re": _round_trip(obj.real), "im": _round_trip(obj.imag)}
    return obj


class _Float17(float):
    def __repr__(self) -> str:
        return f"{float(self):.17g}"

    __str__ = __repr__


def _clamp(raw: float) -> float:
    return min(raw, 1.0)


def holder_certificate_interior(
    Q: ScalarField,
    x0,
    alpha: float,
    eps0: float,
    alpha_n: Optional[float] = None,
    r0: float = 1.0,
    *,
    c_n: Optional[float] = None,
    t_grid: Optional[Sequence[float]] = None,
    resolution: Optional[int] = None,
) -> HolderCertificate:
    """Interior certificate for an open discrete ring Q-map into ``B(0, r0)``.

    ``C = C_n eps0^{-alpha} exp(M)`` with ``C_n = alpha_n (1 + r0^2)/delta``,
    ``delta`` the chordal diameter of the complement of ``B(0, r0)`` and
    ``M`` the supremum of the Dini integral over the grid.  Pass ``c_n`` to
    supply ``C_n`` directly.  ``alpha_n`` defaults to 32 for n = 2 and is
    required otherwise.
    """
    report = dini_condition(Q, x0, alpha, eps0, t_grid, resolution)
    if not report.holds:
        raise Refusal(
            f"Dini-type condition {report.verdict} (estimate {report.estimate:.6g}); no certificate", report
        )
    n = Q.n
    prov = []
    if c_n is None:
        if alpha_n is None:
            if n != 2:
                raise InputError("alpha_n has no known value for n >= 3; supply it explicitly")
            alpha_n = DEFAULT_ALPHA_2
        delta = complement_ball_chordal_diameter(r0)
        c_n = alpha_n * (1.0 + r0 * r0) / delta
        prov += [
            Constant("alpha_n", alpha_n, "distortion factor of the chordal modulus estimate (input)"),
            Constant("r0", r0, "radius of the target ball B(0, r0)"),
            Constant("delta", delta, "chordal diameter of the complement of B(0, r0)"),
            Constant("C_n", c_n, "C_n = alpha_n (1 + r0^2) / delta"),
        ]
    else:
        prov.append(Constant("C_n", c_n, "C_n supplied directly"))
    m_log = max(0.0, float(np.max(report.values)))
    constant = c_n / eps0**alpha * math.exp(m_log)
    prov += [
        Constant("eps0", eps0, "working radius of the Dini condition"),
        Constant("M_log", m_log, "sup over the grid of ∫_t^eps0 (alpha - q^{-1/(n-1)}) dr/r, floored at 0"),
        Constant("C_n_tilde", c_n / eps0**alpha, "C_n / eps0^alpha"),
        Constant("C", constant, "C = C_n eps0^{-alpha} exp(M_log)"),
    ]
    source = "interior-lipschitz" if alpha == 1 else "interior-dini"
    return HolderCertificate(
        report.params["center"], alpha, constant, eps0, source, "euclidean", alpha, False, prov
    )


@dataclass
class BoundLedger:
    """Per-grid comparison of an integral against its claimed bound."""

    constants: dict
    eps: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    all_hold: bool
    violations: list
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "constants": self.constants,
            "all_hold": self.all_hold,
            "violations": self.violations,
            "eps": self.eps,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "notes": self.notes,
        }


def _le(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + _BOUND_RTOL * max(1.0, abs(rhs))


def lemma31_bound(
    Q: ScalarField,
    x0,
    phi: DoublingFunction,
    eps0: float,
    eps_grid: Optional[Sequence[float]] = None,
    resolution: Optional[int] = None,
) -> BoundLedger:
    """Check the doubling-weight annulus bound on a grid.

    ``C`` is the largest weighted ball mean over the grid and
    ``C1 = gamma C Ω_n 2^n / log 2``; every grid eps must satisfy
    ``∫_{eps<|x-x0|<eps0} phi(1/|x-x0|) Q / |x-x0|^n dm <= C1 log(1/eps)``.
    """
    if not 0 < eps0 < 0.5:
        raise InputError(f"eps0 must lie in (0, 1/2), got {eps0}")
    c = _center(Q, x0)
    grid = limsup_grid(eps0) if eps_grid is None else _check_grid(eps_grid, eps0)
    cond = weighted_ball_condition(Q, c, phi, eps0, grid, resolution)
    C = float(np.max(cond.values))
    if not math.isfinite(C):
        raise Refusal("weighted ball mean is unbounded on the grid", cond)
    n = Q.n
    C1 = phi.gamma * C * ball_volume(n) * 2**n / math.log(2)
    lhs = np.array([annulus_weighted_integral(Q, c, float(e), eps0, phi, resolution) for e in grid])
    rhs = C1 * np.log(1.0 / grid)
    ok = [_le(l, r) for l, r in zip(lhs, rhs)]
    return BoundLedger(
        {"C": C, "C1": C1, "gamma": phi.gamma, "Omega_n": ball_volume(n), "n": n, "eps0": eps0},
        grid,
        lhs,
        rhs,
        all(ok),
        [float(e) for e, k in zip(grid, ok) if not k],
        {"weighted_mean_verdict": cond.verdict, "doubling": asdict(check_doubling(phi))},
    )


def ball_mean_certificate(
    Q: ScalarField,
    x0,
    C: float,
    delta_or_r: float,
    eps0: float = 0.25,
    mode: str = "homeo",
    eps_grid: Optional[Sequence[float]] = None,
    resolution: Optional[int] = None,
) -> HolderCertificate:
    """Certificate from a bounded ball mean, explicit for n = 2.

    For n = 2 the exponent is ``log 2 / (4 C)`` and the chordal constant is
    ``(32/delta) eps0^{-exponent}``; ``delta`` is the chordal separation
    (``mode="homeo"``) or the complement diameter of ``B(0, r)``
    (``mode="open-discrete"``).  The validity radius is ``eps0^2``.  For
    n >= 3 a symbolic certificate records ``C1 = C Ω_n 2^n / log 2``.
    """
    if mode not in ("homeo", "open-discrete"):
        raise InputError(f"mode must be 'homeo' or 'open-discrete', got {mode!r}")
    if not 0 < eps0 < 0.5:
        raise InputError(f"eps0 must lie in (0, 1/2), got {eps0}")
    c = _center(Q, x0)
    cond = ball_mean_condition(Q, c, eps0, eps_grid, resolution)
    if not C > 0:
        cond.verdict = "inconclusive"
        raise Refusal("the ball-mean bound C must be positive", cond)
    sup = float(np.max(cond.values))
    if not math.isfinite(sup) or sup > C * (1 + _BOUND_RTOL):
        raise Refusal(f"ball mean reaches {sup:.6g} > C = {C:.6g}", cond)
    n = Q.n
    C1 = C * ball_volume(n) * 2**n / math.log(2)
    prov = [
        Constant("C", C, "bound on the small-ball means of Q (input, verified on the grid)"),
        Constant("ball_mean_sup", sup, "largest ball mean on the grid"),
        Constant("C1", C1, "C1 = gamma C Omega_n 2^n / log 2 with gamma = 1"),
    ]
    if n != 2:
        return HolderCertificate(
            c.tolist(), None, None, eps0, f"ball-mean-{mode}", "chordal", None, True, prov
        )
    if mode == "homeo":
        delta = float(delta_or_r)
        prov.append(Constant("Delta", delta, "chordal separation of the image complement (input)"))
    else:
        delta = complement_ball_chordal_diameter(float(delta_or_r))
        prov.append(Constant("r", float(delta_or_r), "radius of the target ball (input)"))
        prov.append(Constant("delta", delta, "chordal diameter of the complement of B(0, r)"))
    if not delta > 0:
        raise InputError("chordal separation must be positive")
    c_eff = 2.0 * C1
    raw = 2.0 * math.pi / c_eff
    beta = _clamp(raw)
    constant = 32.0 / delta * eps0 ** (-beta)
    prov += [
        Constant("C_eff", c_eff, "C_eff = 2 C1, using log(1/eps) <= 2 log(eps0/eps) for eps < eps0^2"),
        Constant("beta", raw, "beta = 2 pi / C_eff = log 2 / (4 C)"),
        Constant("constant", constant, "(32 / delta) eps0^{-beta}"),
    ]
    return HolderCertificate(c.tolist(), beta, constant, eps0**2, f"ball-mean-{mode}", "chordal", raw, False, prov)


def _psi_integral(psi: Callable[[float], float], lo: float, hi: float) -> float:
    return log_radial_integral(lambda t: psi(t) * t, lo, hi)


def prop3_distortion(
    Q: ScalarField,
    z0,
    psi: Callable[[float], float],
    C: float,
    Delta: float,
    eps0: float,
    z,
    eps_grid: Optional[Sequence[float]] = None,
    resolution: Optional[int] = None,
) -> float:
    """Distortion bound ``(32/Delta) exp(-(2 pi / C) I(|z - z0|))``.

    ``I(eps) = ∫_eps^eps0 psi``.  The hypothesis
    ``∫_{A(z0, eps, eps0)} Q psi(|z-z0|)^2 dm <= C I(eps)`` is checked on the
    grid first (relative slack 1e-9 for quadrature noise).
    """
    if Q.n != 2:
        raise InputError("prop3_distortion is planar")
    c = _center(Q, z0)
    _require_eps0(Q, c, eps0)
    zz = np.asarray(z, dtype=float).reshape(-1)
    dist = float(np.linalg.norm(zz - c))
    if dist >= eps0:
        raise InputError(f"z lies outside D(z0, eps0): |z - z0| = {dist}")
    if not (C > 0 and Delta > 0):
        raise InputError("C and Delta must be positive")
    grid = limsup_grid(eps0, 30) if eps_grid is None else _check_grid(eps_grid, eps0)
    res = resolution or default_resolution(2)
    bad = []
    for e in grid:
        I = _psi_integral(psi, float(e), eps0)
        if not (0 < I < math.inf):
            bad.append((float(e), "I(eps) not in (0, inf)"))
            continue
        lhs = log_radial_integral(lambda r: _sphere_mean(Q, c, r, res, 0) * psi(r) ** 2 * 2 * math.pi * r * r, float(e), eps0)
        if not _le(lhs, C * I):
            bad.append((float(e), f"{lhs:.6g} > {C * I:.6g}"))
    if bad:
        raise Refusal(f"hypothesis violated at {len(bad)} grid radii", bad)
    if dist == 0.0:
        I = _limit_psi_integral(psi, eps0)
    else:
        I = _psi_integral(psi, dist, eps0)
    return 32.0 / Delta * math.exp(-2.0 * math.pi / C * I)


def _limit_psi_integral(psi, eps0: float) -> float:
    acc, hi = 0.0, eps0
    piece = math.inf
    for k in range(1, 200):
        lo = eps0 * 2.0**-k
        piece = _psi_integral(psi, lo, hi)
        acc += piece
        hi = lo
        if piece <= 1e-15 * max(1.0, acc):
            return acc
    return math.inf


def cor3_certificate(
    Delta: float,
    C: float,
    eps0: float,
    Q: Optional[ScalarField] = None,
    z0=None,
    eps_grid: Optional[Sequence[float]] = None,
    resolution: Optional[int] = None,
) -> HolderCertificate:
    """Certificate ``(32/Delta) eps0^{-2pi/C} |z - z0|^{2pi/C}`` (chordal).

    With ``Q`` given, ``∫_{A(z0,eps,eps0)} Q/|z-z0|^2 dm <= C log(eps0/eps)``
    is verified on the grid first.  Exponents above 1 are clamped to 1; since
    ``|z - z0| < eps0`` the clamped bound is weaker, so it stays valid.
    """
    if not (Delta > 0 and C > 0 and eps0 > 0):
        raise InputError("Delta, C and eps0 must be positive")
    center = [0.0, 0.0]
    prov = []
    if Q is not None:
        c = _center(Q, 0 if z0 is None else z0)
        center = c.tolist()
        _require_eps0(Q, c, eps0)
        grid = limsup_grid(eps0, 30) if eps_grid is None else _check_grid(eps_grid, eps0)
        bad = []
        for e in grid:
            lhs = annulus_weighted_integral(Q, c, float(e), eps0, None, resolution)
            rhs = C * math.log(eps0 / e)
            if not _le(lhs, rhs):
                bad.append((float(e), lhs, rhs))
        if bad:
            raise Refusal(f"log-annulus condition violated at {len(bad)} grid radii", bad)
        prov.append(Constant("grid_points", float(len(grid)), "radii where the log-annulus condition was verified"))
    elif z0 is not None:
        center = [float(v) for v in np.ravel(z0)]
    raw = 2.0 * math.pi / C
    expo = _clamp(raw)
    constant = 32.0 / Delta * eps0 ** (-expo)
    prov += [
        Constant("Delta", Delta, "chordal separation of the image complement (input)"),
        Constant("C", C, "log-annulus constant (input)"),
        Constant("exponent", raw, "2 pi / C"),
        Constant("constant", constant, "(32 / Delta) eps0^{-exponent}"),
    ]
    return HolderCertificate(center, expo, constant, eps0, "log-annulus", "chordal", raw, False, prov)


def lemma42_bound(
    Q: ScalarField,
    z0,
    C_star: float,
    delta0: float,
    eps_grid: Optional[Sequence[float]] = None,
    eps0: Optional[float] = None,
    resolution: Optional[int] = None,
) -> BoundLedger:
    """Check ``∫_{A(z0,eps,eps0)} Q/|z-z0|^2 dm <= (4 pi C*/log 2) log(1/eps)``.

    ``z0`` must lie on the unit circle and the disk means of Q about it must
    stay below ``C*`` for radii in ``(0, delta0)``.  ``eps0`` defaults to
    ``min(delta0, 1/4)``.
    """
    if Q.n != 2:
        raise InputError("lemma42_bound is planar")
    c = _center(Q, z0)
    if abs(float(np.linalg.norm(c)) - 1.0) > 1e-12:
        raise InputError("z0 must lie on the unit circle")
    if not 0 < delta0 < 1:
        raise InputError(f"delta0 must lie in (0, 1), got {delta0}")
    if eps0 is None:
        eps0 = min(delta0, 0.25)
    if not 0 < eps0 <= delta0 or eps0 >= 0.5:
        raise InputError("eps0 must lie in (0, min(delta0, 1/2))")
    sup_grid = limsup_grid(delta0, 30)
    means = [ball_mean(Q, c, float(r), resolution) for r in sup_grid]
    sup = float(np.max(means))
    if not sup < C_star:
        raise Refusal(f"disk means reach {sup:.6g} >= C* = {C_star:.6g}", (sup_grid, means))
    grid = limsup_grid(eps0) if eps_grid is None else _check_grid(eps_grid, eps0)
    lhs = np.array([annulus_weighted_integral(Q, c, float(e), eps0, None, resolution) for e in grid])
    factor = 4.0 * math.pi * C_star / math.log(2)
    rhs = factor * np.log(1.0 / grid)
    ok = [_le(l, r) for l, r in zip(lhs, rhs)]
    return BoundLedger(
        {"C_star": C_star, "delta0": delta0, "eps0": eps0, "factor": factor, "disk_mean_sup": sup},
        grid,
        lhs,
        rhs,
        all(ok),
        [float(e) for e, k in zip(grid, ok) if not k],
    )


@dataclass(frozen=True)
class BoundaryCertificate:
    """Boundary Hölder data for disk self-homeomorphisms.

    ``|f(z2) - f(z1)| <= boundary_constant |z2 - z1|^alpha`` when
    ``|z2 - z1| < delta0`` and ``<= global_L |z2 - z1|^alpha`` on the whole circle.
    """

    C: float
    eps0: float
    alpha: float
    delta0: float
    boundary_constant: float
    global_L: float

    def certificates(self) -> tuple[HolderCertificate, HolderCertificate]:
        prov = [
            Constant("C", self.C, "bound on the boundary half-disk means of K_mu (input)"),
            Constant("eps0", self.eps0, "radius range of that bound (input)"),
            Constant("alpha", self.alpha, "alpha = log 2 / (68 C)"),
            Constant("delta0", self.delta0, "delta0 = min(1/2, eps0^2)"),
            Constant("boundary_constant", self.boundary_constant, "64 eps0^{-alpha}"),
            Constant("L", self.global_L, "L = max(2 / delta0^alpha, 64 eps0^{-alpha})"),
        ]
        local = HolderCertificate(
            [1.0, 0.0], self.alpha, self.boundary_constant, self.delta0, "boundary-local", "euclidean",
            self.alpha, False, prov,
        )
        glob = HolderCertificate(
            [1.0, 0.0], self.alpha, self.global_L, math.inf, "boundary-global", "euclidean", self.alpha, False, prov
        )
        return local, glob

    def to_dict(self) -> dict:
        d = asdict(self)
        d["provenance"] = [asdict(c) for c in self.certificates()[0].provenance]
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict())


def boundary_holder_certificate(C: float, eps0: float) -> BoundaryCertificate:
    """``alpha = log 2/(68 C)``, ``delta0 = min(1/2, eps0^2)``, ``L = max(2/delta0^alpha, 64 eps0^-alpha)``."""
    if not C >= 1:
        raise InputError(f"C must be >= 1, got {C}")
    if not 0 < eps0 < 1:
        raise InputError(f"eps0 must lie in (0, 1), got {eps0}")
    alpha = math.log(2) / (68.0 * C)
    delta0 = min(0.5, eps0 * eps0)
    local = 64.0 * eps0 ** (-alpha)
    L = max(2.0 / delta0**alpha, local)
    return BoundaryCertificate(float(C), float(eps0), alpha, delta0, local, L)
