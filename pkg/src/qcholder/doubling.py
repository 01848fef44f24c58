"""Nondecreasing weights with the doubling property phi(2t) <= gamma phi(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import FieldSpecError, InputError

__all__ = ["DoublingCheck", "DoublingFunction", "check_doubling", "parse_doubling_spec"]

_FAMILIES = {
    "const": (),
    "power": ("alpha",),
    "log": (),
    "power+log": ("alpha", "beta"),
    "power*log": ("alpha", "beta"),
    "table": ("path",),
}


@dataclass(frozen=True)
class DoublingFunction:
    """A weight phi on [a, inf) together with its declared doubling data.

    ``gamma`` and ``T`` are user-declared; :func:`check_doubling` verifies
    them by sampling.  The ``table`` family interpolates ``(t, phi)`` pairs
    linearly in log t and holds the end values constant outside the table.
    """

    family: str
    alpha: float = 0.0
    beta: float = 0.0
    a: float = 1.0
    gamma: float = 1.0
    T: float = 1.0
    c: float = 1.0
    table: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise InputError(f"unknown doubling family {self.family!r}")
        if not self.a > 0:
            raise InputError(f"domain start a must be positive, got {self.a}")
        if not self.gamma > 0:
            raise InputError(f"gamma must be positive, got {self.gamma}")
        if not self.T > 0:
            raise InputError(f"threshold T must be positive, got {self.T}")
        if self.alpha < 0 or self.beta < 0:
            raise InputError("alpha and beta must be >= 0")
        if self.family in ("log", "power+log", "power*log") and self.a < 1:
            raise InputError("logarithmic weights need a >= 1 so that log t >= 0")
        if self.family == "table":
            if self.table is None or len(self.table[0]) < 2:
                raise InputError("table weight needs at least two (t, phi) pairs")
            t, v = (np.asarray(x, dtype=float) for x in self.table)
            if np.any(np.diff(t) <= 0) or np.any(v < 0):
                raise InputError("table t must increase and phi must be >= 0")

    @classmethod
    def unit(cls) -> "DoublingFunction":
        """phi == 1 with gamma = 1."""
        return cls("const", gamma=1.0, T=1.0, a=1.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.a * (1 - 1e-12)):
            raise InputError(f"phi evaluated below its domain start a={self.a}")
        if self.family == "const":
            out = np.full(t.shape, self.c)
        elif self.family == "power":
            out = self.c * t**self.alpha
        elif self.family == "log":
            out = self.c * np.log(t)
        elif self.family == "power+log":
            out = self.c * (t**self.alpha + np.log(t) ** self.beta)
        elif self.family == "power*log":
            out = self.c * t**self.alpha * np.log(t) ** self.beta
        else:
            tt, vv = (np.asarray(x, dtype=float) for x in self.table)
            out = np.interp(np.log(t), np.log(tt), vv)
        return out if out.ndim else float(out)

    def describe(self) -> str:
        bits = [self.family]
        if self.family in ("power", "power+log", "power*log"):
            bits.append(f"alpha={self.alpha:g}")
        if self.family in ("power+log", "power*log"):
            bits.append(f"beta={self.beta:g}")
        bits += [f"a={self.a:g}", f"gamma={self.gamma:g}", f"T={self.T:g}"]
        return " ".join(bits)


def parse_doubling_spec(text: str) -> DoublingFunction:
    """Parse ``"log gamma=2 T=2"``, ``"power 1 gamma=2"``, ``"const"`` and friends.

    ``table`` reads a two-column CSV ``t,phi``.
    """
    from .fields import split_spec, _parse_float

    family, raw, off = split_spec(text, _FAMILIES, common=frozenset({"a", "gamma", "T", "c"}))
    kw = {}
    for key in ("alpha", "beta", "a", "gamma", "T", "c"):
        if key in raw:
            kw[key] = _parse_float(raw[key], off[key], key)
    if family == "log" or family.startswith("power+") or family.startswith("power*"):
        kw.setdefault("a", 1.0)
    if family == "table":
        import csv

        with open(raw["path"], newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if rows and rows[0][0].strip() == "t":
            rows = rows[1:]
        try:
            kw["table"] = (tuple(float(r[0]) for r in rows), tuple(float(r[1]) for r in rows))
        except (ValueError, IndexError):
            raise FieldSpecError(f"malformed weight table {raw['path']!r}", off["path"]) from None
    try:
        return DoublingFunction(family, **kw)
    except InputError as exc:
        raise FieldSpecError(str(exc), 0) from None


@dataclass(frozen=True)
class DoublingCheck:
    holds: bool
    worst_ratio: float
    worst_t: float
    nondecreasing: bool


def check_doubling(phi: DoublingFunction, samples: int = 64) -> DoublingCheck:
    """Sample phi(2t)/phi(t) on a geometric grid over [T, 2^32 T].

    Holds iff the worst ratio is at most ``gamma (1 + 1e-12)`` and phi is
    nondecreasing on a geometric grid over [a, 2^33 max(a, T)].
    """
    if samples < 16:
        raise InputError(f"check_doubling needs at least 16 samples, got {samples}")
    t = phi.T * np.exp2(np.linspace(0.0, 32.0, samples))
    t = np.maximum(t, phi.a)
    num = np.asarray(phi(2 * t), dtype=float)
    den = np.asarray(phi(t), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(den > 0, num / den, np.where(num > 0, math.inf, 1.0))
    k = int(np.argmax(ratio))
    worst = float(ratio[k])

    grid = phi.a * np.exp2(np.linspace(0.0, 33.0 + max(0.0, math.log2(max(phi.T, phi.a) / phi.a)), 4 * samples))
    vals = np.asarray(phi(grid), dtype=float)
    mono = bool(np.all(np.diff(vals) >= -1e-12 * np.maximum(1.0, np.abs(vals[:-1]))))
    return DoublingCheck(worst <= phi.gamma * (1 + 1e-12) and mono, worst, float(t[k]), mono)
