"""Dilatation fields Q: R^n -> [0, +inf] and closed-form benchmark maps.

Field specs are one-line strings ``"family key=value ..."``; bare values
fill the family's parameters in order, so ``"const 1.0"`` and
``"const c=1.0"`` are the same field.  Families:

==========  ===============  ==============================================
family      parameters       Q(x), with r = |x - center|
==========  ===============  ==============================================
const       c                c
power       p                r^p
log-power   p q              r^p (log 1/r)^q   (domain radius 1)
radial-K    K                K
fmo-spike   c rho            1 + c on r < rho, 1 elsewhere
grid        path             CSV lattice, see :func:`load_grid_field`
==========  ===============  ==============================================

Every family also accepts ``center=x1,...,xn``, ``n=<dim>`` and
``radius=<domain radius>``; ``grid`` accepts ``mode=nearest|multilinear``.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import DomainError, FieldSpecError, GridFormatError, InputError

__all__ = [
    "BenchmarkMap",
    "GridField",
    "ScalarField",
    "eval_map",
    "identity_map",
    "load_grid_field",
    "load_grid_map",
    "parse_field_spec",
    "parse_map_spec",
    "radial_stretch",
    "tokenize_spec",
]

_TOL = 1e-12


def _norms(x: np.ndarray, center: np.ndarray) -> np.ndarray:
    return np.linalg.norm(x - center, axis=-1)


def _power(r: np.ndarray, p: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        out = np.power(r, p)
    if p == 0:
        out = np.ones_like(r)
    return out


def _log_power(r: np.ndarray, p: float, q: float) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        out = _power(r, p) * _power(np.log(1.0 / r), q)
    at0 = r == 0
    if np.any(at0):
        if p < 0 or (p == 0 and q > 0):
            v = math.inf
        elif p == 0 and q == 0:
            v = 1.0
        else:
            v = 0.0
        out = np.where(at0, v, out)
    return out


class ScalarField:
    """Nonnegative extended-real field on the ball ``B(center, domain_radius)``.

    Call it with an array of points of shape ``(..., n)``; the result has
    shape ``(...)`` and values in ``[0, +inf]``.
    """

    def __init__(
        self,
        n: int,
        kind: str,
        func: Callable[[np.ndarray], np.ndarray],
        params: Optional[dict] = None,
        center=None,
        domain_radius: float = math.inf,
    ):
        if n < 2:
            raise InputError(f"field dimension must be >= 2, got {n}")
        self.n = int(n)
        self.kind = kind
        self.params = dict(params or {})
        self.center = np.zeros(n) if center is None else np.asarray(center, dtype=float).reshape(-1)
        if self.center.size != n:
            raise InputError(f"center has dimension {self.center.size}, expected {n}")
        self.domain_radius = float(domain_radius)
        self._func = func

    @classmethod
    def from_function(cls, n: int, func, *, kind: str = "custom", center=None, domain_radius=math.inf):
        """Wrap a vectorized callable ``points (..., n) -> values (...)``."""
        return cls(n, kind, func, center=center, domain_radius=domain_radius)

    def __call__(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float)
        if pts.shape[-1] != self.n:
            raise InputError(f"points have dimension {pts.shape[-1]}, field has {self.n}")
        return np.asarray(self._func(pts), dtype=float)

    def value(self, x) -> float:
        return float(self(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def contains_ball(self, x0, r: float) -> bool:
        if math.isinf(self.domain_radius):
            return True
        d = float(np.linalg.norm(np.asarray(x0, dtype=float).reshape(-1) - self.center))
        return d + r <= self.domain_radius * (1 + _TOL)

    def require_ball(self, x0, r: float) -> None:
        if not self.contains_ball(x0, r):
            raise DomainError(
                f"ball of radius {r} about {list(np.ravel(x0))} leaves the field domain "
                f"B({list(self.center)}, {self.domain_radius})"
            )

    def plus(self, other: "ScalarField") -> "ScalarField":
        """Pointwise sum, defined on the smaller of the two domains."""
        if other.n != self.n:
            raise InputError("dimension mismatch in field sum")
        a, b = self, other
        if a.domain_radius <= b.domain_radius:
            center, radius = a.center, a.domain_radius
        else:
            center, radius = b.center, b.domain_radius
        return ScalarField(self.n, f"({a.kind})+({b.kind})", lambda x: a(x) + b(x), center=center, domain_radius=radius)

    def __repr__(self) -> str:
        return f"ScalarField(n={self.n}, kind={self.kind!r}, params={self.params})"


# ---------------------------------------------------------------- field specs

_TOKEN = re.compile(r"\S+")

_FAMILIES = {
    "const": ("c",),
    "power": ("p",),
    "log-power": ("p", "q"),
    "radial-K": ("K",),
    "fmo-spike": ("c", "rho"),
    "grid": ("path",),
}
_COMMON_KEYS = {"center", "n", "radius", "mode"}


def tokenize_spec(text: str) -> list[tuple[str, int]]:
    """Split a spec line into ``(token, offset)`` pairs."""
    return [(m.group(0), m.start()) for m in _TOKEN.finditer(text)]


def _parse_float(tok: str, pos: int, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise FieldSpecError(f"malformed number for {what}: {tok!r}", pos) from None


def _parse_vector(tok: str, pos: int, what: str) -> list[float]:
    parts = tok.split(",")
    out = []
    off = pos
    for part in parts:
        out.append(_parse_float(part, off, what))
        off += len(part) + 1
    return out


def split_spec(text: str, families: dict, common=frozenset(_COMMON_KEYS)) -> tuple[str, dict, dict]:
    """Parse ``family [positional...] [key=value...]`` against a parameter table.

    Returns ``(family, values, offsets)`` with raw string values.
    """
    tokens = tokenize_spec(text)
    if not tokens:
        raise FieldSpecError("empty spec", 0)
    family, fpos = tokens[0]
    if family not in families:
        raise FieldSpecError(f"unknown family {family!r}; expected one of {sorted(families)}", fpos)
    names = families[family]
    values: dict[str, str] = {}
    offsets: dict[str, int] = {}
    positional = 0
    for tok, pos in tokens[1:]:
        if "=" in tok:
            key, _, val = tok.partition("=")
            if key not in names and key not in common:
                raise FieldSpecError(f"unknown parameter {key!r} for family {family!r}", pos)
            if not val:
                raise FieldSpecError(f"missing value for {key!r}", pos + len(key) + 1)
            if key in values:
                raise FieldSpecError(f"parameter {key!r} given twice", pos)
            values[key] = val
            offsets[key] = pos + len(key) + 1
        else:
            if positional >= len(names):
                raise FieldSpecError(f"unexpected value {tok!r}", pos)
            key = names[positional]
            positional += 1
            if key in values:
                raise FieldSpecError(f"parameter {key!r} given twice", pos)
            values[key] = tok
            offsets[key] = pos
    missing = [k for k in names if k not in values]
    if missing:
        raise FieldSpecError(f"family {family!r} needs parameter {missing[0]!r}", len(text))
    return family, values, offsets


def parse_field_spec(text: str, *, base_dir: Optional[Path] = None) -> ScalarField:
    """Build a :class:`ScalarField` from a one-line spec string."""
    family, raw, off = split_spec(text, _FAMILIES)

    if family == "grid":
        path = Path(raw["path"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        mode = raw.get("mode", "nearest")
        if mode not in ("nearest", "multilinear"):
            raise FieldSpecError(f"unknown interpolation mode {mode!r}", off["mode"])
        return load_grid_field(path, mode)

    center = None
    if "center" in raw:
        center = _parse_vector(raw["center"], off["center"], "center")
    n = None
    if "n" in raw:
        nv = _parse_float(raw["n"], off["n"], "n")
        if nv != int(nv) or nv < 2:
            raise FieldSpecError(f"dimension must be an integer >= 2, got {raw['n']!r}", off["n"])
        n = int(nv)
    if center is not None and n is not None and len(center) != n:
        raise FieldSpecError(f"center has {len(center)} coordinates but n={n}", off["center"])
    if n is None:
        n = len(center) if center is not None else 2
    if center is not None and len(center) < 2:
        raise FieldSpecError("center needs at least two coordinates", off["center"])
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)

    p = {k: _parse_float(v, off[k], k) for k, v in raw.items() if k in _FAMILIES[family]}
    radius = math.inf
    if "radius" in raw:
        radius = _parse_float(raw["radius"], off["radius"], "radius")
        if not radius > 0:
            raise FieldSpecError("domain radius must be positive", off["radius"])

    if family in ("const", "radial-K"):
        key = "c" if family == "const" else "K"
        val = p[key]
        if not val >= 0:
            raise FieldSpecError(f"{key} must be >= 0", off[key])
        func = lambda x, v=val: np.full(x.shape[:-1], v)
    elif family == "power":
        pp = p["p"]
        func = lambda x, pp=pp, c=c: _power(_norms(x, c), pp)
    elif family == "log-power":
        pp, qq = p["p"], p["q"]
        radius = min(radius, 1.0)
        func = lambda x, pp=pp, qq=qq, c=c: _log_power(_norms(x, c), pp, qq)
    elif family == "fmo-spike":
        cc, rho = p["c"], p["rho"]
        if not cc >= 0:
            raise FieldSpecError("c must be >= 0", off["c"])
        if not rho > 0:
            raise FieldSpecError("rho must be > 0", off["rho"])
        func = lambda x, cc=cc, rho=rho, c=c: 1.0 + cc * (_norms(x, c) < rho)
    else:  # pragma: no cover - table and branches kept in sync
        raise FieldSpecError(f"unhandled family {family!r}", 0)
    return ScalarField(n, family, func, params=p, center=c, domain_radius=radius)


# ---------------------------------------------------------------- grid fields


@dataclass
class GridField:
    """Samples on a regular lattice with nearest or multilinear interpolation."""

    axes: list
    samples: np.ndarray
    mode: str = "nearest"
    _interp: RegularGridInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        if self.mode not in ("nearest", "multilinear"):
            raise InputError(f"unknown interpolation mode {self.mode!r}")
        method = "nearest" if self.mode == "nearest" else "linear"
        self._interp = RegularGridInterpolator(tuple(self.axes), self.samples, method=method, bounds_error=False)

    @property
    def spacing(self) -> list[float]:
        return [float(a[1] - a[0]) for a in self.axes]

    @property
    def box(self) -> list[tuple[float, float]]:
        return [(float(a[0]), float(a[-1])) for a in self.axes]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        pts = np.asarray(x, dtype=float)
        flat = pts.reshape(-1, pts.shape[-1])
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        slack = 1e-12 * np.maximum(1.0, np.abs(hi - lo))
        if np.any(flat < lo - slack) or np.any(flat > hi + slack):
            raise DomainError("grid field evaluated outside its lattice box")
        return self._interp(np.clip(flat, lo, hi)).reshape(pts.shape[:-1])


def _read_lattice(path: Path, n_value_cols: int, value_names: Optional[list] = None):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise GridFormatError("empty file", 0) from None
        n = len(header) - n_value_cols
        if n < 2:
            raise GridFormatError(f"need at least 2 coordinate columns, header {header}", 0)
        expected = [f"x{i + 1}" for i in range(n)] + (value_names or ["q"])
        if header != expected:
            raise GridFormatError(f"header must be {','.join(expected)}, got {','.join(header)}", 0)
        rows = []
        for i, rec in enumerate(reader, start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise GridFormatError(f"expected {len(header)} columns, got {len(rec)}", i)
            try:
                vals = [float(c) for c in rec]
            except ValueError:
                raise GridFormatError(f"malformed number in {rec}", i) from None
            if not all(math.isfinite(v) for v in vals):
                raise GridFormatError("non-finite entry", i)
            rows.append((i, vals))
    if not rows:
        raise GridFormatError("no data rows", 1)

    coords = np.array([r[1][:n] for r in rows])
    axes = []
    for k in range(n):
        ax = np.unique(coords[:, k])
        if ax.size < 2:
            raise GridFormatError(f"axis x{k + 1} needs at least 2 lattice values", rows[0][0])
        steps = np.diff(ax)
        if np.max(np.abs(steps - steps[0])) > 1e-9 * max(abs(steps[0]), 1e-300):
            bad = int(np.argmax(np.abs(steps - steps[0])))
            row = next(r for r, v in rows if v[k] == ax[bad + 1])
            raise GridFormatError(f"irregular spacing on axis x{k + 1}", row)
        axes.append(ax)
    shape = tuple(a.size for a in axes)
    values = np.full(shape + (n_value_cols,), np.nan)
    for (row, vals) in rows:
        idx = tuple(int(np.searchsorted(axes[k], vals[k])) for k in range(n))
        if not np.all(np.isnan(values[idx])):
            raise GridFormatError(f"duplicate lattice node {vals[:n]}", row)
        values[idx] = vals[n:]
    if len(rows) != int(np.prod(shape)):
        raise GridFormatError(
            f"ragged lattice: expected {int(np.prod(shape))} nodes, got {len(rows)}", rows[-1][0] + 1
        )
    return axes, values, rows


def load_grid_field(path, mode: str = "nearest") -> ScalarField:
    """Read a CSV lattice ``x1,...,xn,q`` into a :class:`ScalarField`.

    Nodes must form a full regular product lattice.  Negative or non-finite
    samples are rejected with the offending row number.
    """
    axes, values, rows = _read_lattice(Path(path), 1)
    for row, vals in rows:
        if vals[-1] < 0:
            raise GridFormatError(f"negative sample {vals[-1]}", row)
    grid = GridField(axes, values[..., 0], mode)
    box = grid.box
    center = np.array([(lo + hi) / 2 for lo, hi in box])
    radius = min((hi - lo) / 2 for lo, hi in box)
    return ScalarField(
        len(axes), "grid", grid, params={"path": str(path), "mode": mode}, center=center, domain_radius=radius
    )


# ---------------------------------------------------------------- benchmark maps


@dataclass(frozen=True)
class BenchmarkMap:
    """Closed-form test map R^n -> R^n.

    ``kind`` is ``"identity"``, ``"radial"`` (x |x|^{a-1}) or ``"grid"``.
    ``exact_dilatation`` is the constant Q for which the map satisfies the
    ring inequality with equality on extremal densities, when known.
    """

    n: int
    kind: str
    a: float = 1.0
    func: Optional[Callable] = None

    def __post_init__(self):
        if self.kind == "radial" and not (0 < self.a <= 1):
            raise InputError(f"radial stretch exponent must lie in (0, 1], got {self.a}")

    @property
    def is_radial(self) -> bool:
        return self.kind in ("identity", "radial")

    @property
    def exact_dilatation(self) -> Optional[float]:
        if self.kind == "identity":
            return 1.0
        if self.kind == "radial":
            return self.a ** (1 - self.n)
        return None

    def radial_profile(self, r):
        """|f(x)| as a function of |x| for radial maps."""
        if self.kind == "identity":
            return r
        if self.kind == "radial":
            return np.power(r, self.a)
        raise InputError("radial_profile requested for a non-radial map")

    def __call__(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float)
        if self.kind == "identity":
            return pts.copy()
        if self.kind == "radial":
            if self.a == 1.0:
                return pts.copy()
            r = np.linalg.norm(pts, axis=-1, keepdims=True)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = pts * np.power(r, self.a - 1.0)
            return np.where(r == 0, 0.0, out)
        return np.asarray(self.func(pts), dtype=float)


def identity_map(n: int = 2) -> BenchmarkMap:
    return BenchmarkMap(n, "identity")


def radial_stretch(a: float, n: int = 2) -> BenchmarkMap:
    return BenchmarkMap(n, "radial", float(a))


def eval_map(f: BenchmarkMap, x) -> np.ndarray:
    """Evaluate a benchmark map at one point or an array of points."""
    return f(x)


def parse_map_spec(text: str, n: int = 2) -> BenchmarkMap:
    """``identity``, ``radial:<a>`` or ``grid:<path>``."""
    kind, _, arg = text.strip().partition(":")
    if kind == "identity" and not arg:
        return identity_map(n)
    if kind == "radial":
        try:
            return radial_stretch(float(arg), n)
        except ValueError:
            raise FieldSpecError(f"malformed radial exponent {arg!r}", len(kind) + 1) from None
    if kind == "grid" and arg:
        return load_grid_map(arg)
    raise FieldSpecError(f"unknown map spec {text!r}; expected identity, radial:<a> or grid:<path>", 0)


def load_grid_map(path) -> BenchmarkMap:
    """Read a sampled map from CSV ``x1,...,xn,y1,...,yn`` (multilinear interpolation)."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if not header or len(header) % 2:
        raise GridFormatError("map lattice header must be x1..xn,y1..yn", 0)
    n = len(header) // 2
    axes, values, _ = _read_lattice(path, n, [f"y{i + 1}" for i in range(n)])
    interp = RegularGridInterpolator(tuple(axes), values, method="linear", bounds_error=True)

    def func(x):
        pts = np.asarray(x, dtype=float)
        try:
            out = interp(pts.reshape(-1, n))
        except ValueError as exc:
            raise DomainError(str(exc)) from None
        return out.reshape(pts.shape)

    return BenchmarkMap(n, "grid", func=func)
