"""
Weighted function norms: Lebesgue, weak Lebesgue, Morrey, weak Morrey, BMO.

Whole-grid sums and cube sums follow the canonical order of
:mod:`weightlab.grid`.  Weak norms take the supremum over ``lambda`` exactly
on the finite set of distinct ``|f|`` values, where ``{|f| > lambda}`` for
``lambda`` just below a level ``v`` includes the cells equal to ``v``.  Each
candidate level contributes ``v * mass ** (1/p)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigurationError, DegenerateWeightError, DomainError, ParseError
from .grid import Cube, CubeFamily, GridFunction, grid_total, scan_max
from .weights import Weight

_LEVEL_CHUNK = 256


class NormKind(enum.Enum):
    LEBESGUE = "Lp"
    WEAK_LEBESGUE = "wLp"
    MORREY = "Morrey"
    WEAK_MORREY = "wMorrey"
    BMO = "BMO"
    BMO_INF = "BMOinf"


@dataclass(frozen=True)
class NormSpec:
    """A norm family with its exponents (``q`` only for the Morrey kinds)."""

    kind: NormKind
    p: float | None = None
    q: float | None = None

    def __post_init__(self):
        k = self.kind
        if k in (NormKind.LEBESGUE, NormKind.WEAK_LEBESGUE):
            if self.p is None or not self.p > 0 or math.isinf(self.p):
                raise DomainError(f"{k.value} needs 0 < p < inf")
        elif k in (NormKind.MORREY, NormKind.WEAK_MORREY):
            if self.p is None or self.q is None:
                raise DomainError(f"{k.value} needs p and q")
            if not (0 < self.q <= self.p < math.inf):
                raise DomainError(f"{k.value} needs 0 < q <= p < inf, got p={self.p}, q={self.q}")
        elif k is NormKind.BMO:
            if self.p is None or not self.p >= 1 or math.isinf(self.p):
                raise DomainError("BMO needs 1 <= p < inf")

    @classmethod
    def parse(cls, text: str) -> "NormSpec":
        raw = text.strip()
        head, _, tail = raw.partition(":")
        try:
            kind = NormKind(head)
        except ValueError:
            raise ParseError("unknown norm family", head) from None
        nums = []
        if tail:
            for tok in tail.split(","):
                try:
                    nums.append(float(tok))
                except ValueError:
                    raise ParseError("bad exponent", tok) from None
        want = {NormKind.BMO_INF: 0, NormKind.MORREY: 2, NormKind.WEAK_MORREY: 2}.get(kind, 1)
        if len(nums) != want:
            raise ParseError(f"{kind.value} takes {want} exponent(s)", raw)
        return cls(kind, *nums)

    def render(self) -> str:
        if self.kind is NormKind.BMO_INF:
            return "BMOinf"
        if self.kind in (NormKind.MORREY, NormKind.WEAK_MORREY):
            return f"{self.kind.value}:{_num(self.p)},{_num(self.q)}"
        return f"{self.kind.value}:{_num(self.p)}"


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _check(f: GridFunction, w: Weight) -> None:
    if f.grid != w.grid:
        raise ConfigurationError("function and weight live on different grids")


def _check_support(f: GridFunction, w: Weight) -> None:
    # a zero-weight cube holding f exists iff some single cell does
    if np.any((w.values <= 0) & (f.values != 0)):
        raise DegenerateWeightError("a cube of zero weight carries mass of f")


def _levels(absf: np.ndarray, levels) -> np.ndarray:
    if levels is None:
        lv = np.unique(absf)
    else:
        lv = np.unique(np.asarray(levels, dtype=float))
    return lv[lv > 0]


def lebesgue_norm(f: GridFunction, w: Weight, p: float) -> float:
    """``(sum |f|^p w vol)^(1/p)``."""
    _check(f, w)
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p}")
    dens = np.abs(f.values) ** p * w.values
    total = np.atleast_1d(grid_total(dens, f.grid.dim) * f.grid.cell_volume)
    # array power, so the result matches the cube scans bit for bit
    return float((total ** (1.0 / p))[0])


def weak_lebesgue_norm(f: GridFunction, w: Weight, p: float, levels=None) -> float:
    """
    ``sup_lambda lambda * w({|f| > lambda})^(1/p)`` by a scan over the levels of ``|f|``.

    Passing ``levels`` restricts the scan to those values of ``lambda`` (taken
    from below), which can only lower the result.
    """
    _check(f, w)
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p}")
    absf = np.abs(f.values)
    lv = _levels(absf, levels)
    best = 0.0
    dim, vol = f.grid.dim, f.grid.cell_volume
    for start in range(0, lv.size, _LEVEL_CHUNK):
        chunk = lv[start : start + _LEVEL_CHUNK]
        shape = (chunk.size,) + (1,) * dim
        masked = np.where(absf[None, ...] >= chunk.reshape(shape), w.values[None, ...], 0.0)
        mass = grid_total(masked, dim) * vol
        best = max(best, float(np.max(chunk * mass ** (1.0 / p))))
    return best


def _morrey_scan(f, w, p, q, family):
    _check(f, w)
    _check_support(f, w)
    dens = np.abs(f.values) ** q * w.values
    vol = f.grid.cell_volume
    a = 1.0 / p - 1.0 / q

    def combine(s, S):
        wq = S[0] * vol
        fq = S[1] * vol
        return _morrey_value(wq, fq, a, q)

    return scan_max(f.grid, family, [w.values, dens], combine)


def _morrey_value(wq, fq, a, q):
    if np.any((wq <= 0) & (fq > 0)):
        raise DegenerateWeightError("a cube of zero weight carries mass of f")
    with np.errstate(divide="ignore", invalid="ignore"):
        v = wq**a * fq ** (1.0 / q)
    return np.where(wq > 0, v, 0.0)


def morrey_norm(
    f: GridFunction, w: Weight, p: float, q: float, family: CubeFamily = CubeFamily.ALL
) -> float:
    """``sup_Q w(Q)^(1/p - 1/q) (int_Q |f|^q w)^(1/q)``."""
    NormSpec(NormKind.MORREY, p, q)
    return _morrey_scan(f, w, p, q, family)[0]


def _weak_morrey_scan(f, w, p, q, family, levels=None):
    _check(f, w)
    _check_support(f, w)
    absf = np.abs(f.values)
    lv = _levels(absf, levels)
    if lv.size == 0:
        return 0.0, Cube((0,) * f.grid.dim, 1)
    dim, vol = f.grid.dim, f.grid.cell_volume
    shape = (lv.size,) + (1,) * dim
    masks = np.where(absf[None, ...] >= lv.reshape(shape), w.values[None, ...], 0.0)
    a = 1.0 / p - 1.0 / q
    lv_b = lv.reshape((lv.size,) + (1,) * dim)

    def combine(s, S):
        wq = S[0] * vol
        mass = S[1] * vol
        if np.any((wq <= 0) & (mass[0] > 0)):
            raise DegenerateWeightError("a cube of zero weight carries mass of f")
        with np.errstate(divide="ignore", invalid="ignore"):
            v = wq**a * np.max(lv_b * mass ** (1.0 / q), axis=0)
        return np.where(wq > 0, v, 0.0)

    return scan_max(f.grid, family, [w.values, masks], combine)


def weak_morrey_norm(
    f: GridFunction,
    w: Weight,
    p: float,
    q: float,
    family: CubeFamily = CubeFamily.ALL,
    levels=None,
) -> float:
    """``sup_Q w(Q)^(1/p - 1/q) sup_lambda lambda w({x in Q: |f| > lambda})^(1/q)``."""
    NormSpec(NormKind.WEAK_MORREY, p, q)
    return _weak_morrey_scan(f, w, p, q, family, levels)[0]


def _windows(values: np.ndarray, s: int, dyadic: bool) -> np.ndarray:
    dim = values.ndim
    win = sliding_window_view(values, (s,) * dim)
    if dyadic:
        win = win[(slice(None, None, s),) * dim]
    return win


def _window_total(block: np.ndarray, dim: int) -> np.ndarray:
    # canonical order inside each window: rows left to right, then down
    if dim == 2:
        block = np.cumsum(block, axis=-1)[..., -1]
    return np.cumsum(block, axis=-1)[..., -1]


def _bmo_scan(f, w, p, family, method="direct"):
    _check(f, w)
    if not p >= 1:
        raise DomainError(f"BMO needs p >= 1, got {p}")
    if p > 1 and np.any(w.values <= 0):
        raise DegenerateWeightError("BMO^p with p > 1 needs a strictly positive weight")
    dim, vol = f.grid.dim, f.grid.cell_volume
    fv = f.values
    wpow = np.ones_like(w.values) if p == 1 else w.values ** (1.0 - p)
    dyadic = family is CubeFamily.DYADIC

    if method == "moments":
        if p != 2:
            raise ConfigurationError("the moment method is only available for p = 2")
        arrays = [w.values, fv, fv * fv * wpow, fv * wpow, wpow]

        def combine(s, S):
            n = float(s**dim)
            m = S[1] / n
            osc = np.maximum(S[2] - 2.0 * m * S[3] + m * m * S[4], 0.0)
            return _bmo_value(S[0] * vol, osc * vol, p)

        return scan_max(f.grid, family, arrays, combine)
    if method != "direct":
        raise ConfigurationError(f"unknown BMO method {method!r}")

    def combine(s, S):
        n = float(s**dim)
        mean = S[1] / n
        fw = _windows(fv, s, dyadic)
        ww = _windows(wpow, s, dyadic)
        dev = np.abs(fw - mean[(...,) + (None,) * dim]) ** p * ww
        return _bmo_value(S[0] * vol, _window_total(dev, dim) * vol, p)

    return scan_max(f.grid, family, [w.values, fv], combine)


def _bmo_value(wq, integral, p):
    if np.any((wq <= 0) & (integral > 0)):
        raise DegenerateWeightError("a cube of zero weight has nonzero mean oscillation")
    with np.errstate(divide="ignore", invalid="ignore"):
        v = (integral / wq) ** (1.0 / p)
    return np.where(wq > 0, v, 0.0)


def bmo_norm(
    f: GridFunction,
    w: Weight,
    p: float,
    family: CubeFamily = CubeFamily.ALL,
    method: str = "direct",
) -> float:
    """
    ``sup_Q (w(Q)^-1 int_Q |f - f_Q|^p w^(1-p))^(1/p)``.

    ``method="moments"`` (p = 2 only) expands the square into cube sums of
    ``f^2/w``, ``f/w`` and ``1/w``; it is O(cubes) instead of O(cubes * cells)
    and agrees with the direct sum to rounding of order ``1e-8 * max|f|``.
    """
    return _bmo_scan(f, w, p, family, method)[0]


def _bmo_inf_scan(f, w, family):
    _check(f, w)
    if np.any(w.values <= 0):
        raise DegenerateWeightError("BMO^inf needs a strictly positive weight")
    dim = f.grid.dim
    fv, wv = f.values, w.values
    dyadic = family is CubeFamily.DYADIC

    def combine(s, S):
        mean = S[0] / float(s**dim)
        ratio = np.abs(_windows(fv, s, dyadic) - mean[(...,) + (None,) * dim]) / _windows(wv, s, dyadic)
        axes = tuple(range(-dim, 0))
        return ratio.max(axis=axes)

    return scan_max(f.grid, family, [fv], combine)


def bmo_inf_norm(f: GridFunction, w: Weight, family: CubeFamily = CubeFamily.ALL) -> float:
    """``sup_Q max_{cells in Q} |f - f_Q| / w``."""
    return _bmo_inf_scan(f, w, family)[0]


def evaluate_norm(
    f: GridFunction, w: Weight, spec: NormSpec, family: CubeFamily = CubeFamily.ALL, **kw
) -> tuple[float, Cube | None]:
    """Dispatch on ``spec``; cube-based norms also return their witness cube."""
    k = spec.kind
    if k is NormKind.LEBESGUE:
        return lebesgue_norm(f, w, spec.p), None
    if k is NormKind.WEAK_LEBESGUE:
        return weak_lebesgue_norm(f, w, spec.p, kw.get("levels")), None
    if k is NormKind.MORREY:
        return _morrey_scan(f, w, spec.p, spec.q, family)
    if k is NormKind.WEAK_MORREY:
        return _weak_morrey_scan(f, w, spec.p, spec.q, family, kw.get("levels"))
    if k is NormKind.BMO:
        return _bmo_scan(f, w, spec.p, family, kw.get("method", "direct"))
    return _bmo_inf_scan(f, w, family)


def norm(f: GridFunction, w: Weight, spec: NormSpec, family: CubeFamily = CubeFamily.ALL, **kw) -> float:
    return evaluate_norm(f, w, spec, family, **kw)[0]
