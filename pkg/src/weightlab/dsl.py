"""Small string languages for grids, weights and test functions used on the command line."""

from __future__ import annotations

import numpy as np

from .errors import ParseError
from .grid import Grid, GridFunction, read_grid
from .weights import Weight


def _floats(text: str, count: int | None, what: str) -> list[float]:
    parts = [t for t in text.split(",")]
    if count is not None and len(parts) != count:
        raise ParseError(f"{what} expects {count} comma-separated numbers", text)
    try:
        return [float(t) for t in parts]
    except ValueError:
        raise ParseError(f"bad number in {what}", text) from None


def parse_grid(text: str) -> Grid:
    """``1d:lo,hi,N`` or ``2d:lo,hi,N`` (a square)."""
    head, sep, tail = text.strip().partition(":")
    if not sep or head not in ("1d", "2d"):
        raise ParseError("grid spec must start with 1d: or 2d:", text)
    lo, hi, n = _floats(tail, 3, "grid spec")
    if not n.is_integer() or n < 1:
        raise ParseError("cell count must be a positive integer", tail.split(",")[-1])
    try:
        if head == "1d":
            return Grid.line(lo, hi, int(n))
        return Grid.square(lo, hi, int(n))
    except ValueError as exc:
        raise ParseError(str(exc), text) from None


def render_grid(grid: Grid) -> str:
    if grid.dim == 2 and (grid.lo[0], grid.hi[0], grid.cells[0]) != (grid.lo[1], grid.hi[1], grid.cells[1]):
        raise ParseError("only square 2D grids have a grid spec", grid.describe())
    return f"{grid.dim}d:{_num(grid.lo[0])},{_num(grid.hi[0])},{grid.cells[0]}"


def _num(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def _from_file(path: str, grid: Grid) -> GridFunction:
    try:
        f = read_grid(path)
    except OSError as exc:
        raise ParseError(f"cannot read grid file ({exc.strerror})", path) from None
    if f.grid != grid:
        raise ParseError(f"grid file is on {f.grid.describe()}, expected {grid.describe()}", path)
    return f


def parse_weight(text: str, grid: Grid) -> Weight:
    """``power:<a>``, ``step:<v1>,<v2>@<x0>``, ``file:<path>`` or ``const:<c>``."""
    head, sep, tail = text.strip().partition(":")
    if not sep:
        raise ParseError("weight spec needs a kind prefix", text)
    if head == "const":
        (c,) = _floats(tail, 1, "const weight")
        return Weight.constant(grid, c)
    if head == "power":
        (a,) = _floats(tail, 1, "power weight")
        return Weight.power_law(grid, a)
    if head == "step":
        vals, at, x0 = tail.partition("@")
        if not at:
            raise ParseError("step weight needs '@<x0>'", tail)
        v1, v2 = _floats(vals, 2, "step weight")
        (x,) = _floats(x0, 1, "step position")
        return Weight.step(grid, v1, v2, x)
    if head == "file":
        return Weight(_from_file(tail, grid), label=text.strip())
    raise ParseError("unknown weight kind", head)


def _interval_fraction(edges: np.ndarray, a: float, b: float) -> np.ndarray:
    lo = np.maximum(edges[:-1], a)
    hi = np.minimum(edges[1:], b)
    return np.clip(hi - lo, 0.0, None) / np.diff(edges)


def parse_function(text: str, grid: Grid) -> GridFunction:
    """
    Weight kinds plus ``indicator:<a>,<b>`` (the cube ``[a,b]^n``, exact cell
    averages) and ``coord`` / ``coord:<axis>`` (the coordinate ``x_axis``).
    """
    raw = text.strip()
    if raw == "coord":
        raw = "coord:1"
    head, sep, tail = raw.partition(":")
    if head == "indicator":
        a, b = _floats(tail, 2, "indicator")
        if not a < b:
            raise ParseError("indicator needs a < b", tail)
        frac = _interval_fraction(grid.edges(0), a, b)
        if grid.dim == 2:
            frac = frac[:, None] * _interval_fraction(grid.edges(1), a, b)[None, :]
        return GridFunction(grid, frac)
    if head == "coord":
        try:
            axis = int(tail) - 1
        except ValueError:
            raise ParseError("bad coordinate axis", tail) from None
        if not 0 <= axis < grid.dim:
            raise ParseError("coordinate axis out of range", tail)
        return GridFunction(grid, grid.mesh()[axis])
    return parse_weight(raw, grid).function
