"""
Uniform grids, cell-averaged functions and cube scans.

Every function on a grid is stored as one real number per cell, read as the
average of the underlying function over that cell.  Integrals over unions of
cells are therefore exact.  A cube is a union of whole cells with the same
number of cells along every axis.

All cube sums use one canonical floating-point order: inside each row the
cells are added left to right, then the row totals are added top to bottom
(in 1D there is only one row).  `cube_sum` and the vectorized scan in
`cube_sums` both follow that order, so any quantity built from them is
reproducible bit-for-bit by a naive loop that adds cells in the same order.
"""

from __future__ import annotations

import enum
import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import ConfigurationError, DimensionError, GridRangeError, ParseError

GRID_MAGIC = "weightlab-grid v1"


def thread_count() -> int:
    """Worker threads allowed by ``WEIGHTLAB_THREADS`` (0 or unset means auto)."""
    raw = os.environ.get("WEIGHTLAB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"WEIGHTLAB_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ConfigurationError("WEIGHTLAB_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class Grid:
    """Uniform partition of the box ``[lo, hi]`` into ``cells`` per axis."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    cells: tuple[int, ...]

    def __post_init__(self):
        lo = tuple(float(x) for x in np.atleast_1d(self.lo))
        hi = tuple(float(x) for x in np.atleast_1d(self.hi))
        cells = tuple(int(n) for n in np.atleast_1d(self.cells))
        if not (len(lo) == len(hi) == len(cells)):
            raise ConfigurationError("lo, hi and cells must have the same length")
        if len(cells) not in (1, 2):
            raise DimensionError(f"only dimensions 1 and 2 are supported, got {len(cells)}")
        for a, b, n in zip(lo, hi, cells):
            if not (np.isfinite(a) and np.isfinite(b) and a < b):
                raise ConfigurationError(f"invalid axis bounds [{a}, {b}]")
            if n < 1:
                raise ConfigurationError(f"cell count must be >= 1, got {n}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def line(cls, lo: float, hi: float, cells: int) -> "Grid":
        return cls((lo,), (hi,), (cells,))

    @classmethod
    def square(cls, lo: float, hi: float, cells: int) -> "Grid":
        return cls((lo, lo), (hi, hi), (cells, cells))

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def size(self) -> int:
        return int(np.prod(self.cells))

    @property
    def cell_size(self) -> tuple[float, ...]:
        return tuple((b - a) / n for a, b, n in zip(self.lo, self.hi, self.cells))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_size))

    def edges(self, axis: int = 0) -> np.ndarray:
        return np.linspace(self.lo[axis], self.hi[axis], self.cells[axis] + 1)

    def centers(self, axis: int = 0) -> np.ndarray:
        h = self.cell_size[axis]
        return self.lo[axis] + (np.arange(self.cells[axis]) + 0.5) * h

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Cell-center coordinates, one array of ``shape`` per axis."""
        return np.meshgrid(*(self.centers(i) for i in range(self.dim)), indexing="ij")

    def contains_origin(self) -> bool:
        return all(a <= 0.0 <= b for a, b in zip(self.lo, self.hi))

    def max_side(self) -> int:
        return min(self.cells)

    def cube_volume(self, side: int) -> float:
        return side**self.dim * self.cell_volume

    def whole(self) -> "Cube":
        """Largest cube anchored at the origin corner of the index space."""
        return Cube((0,) * self.dim, self.max_side())

    def describe(self) -> str:
        axes = ";".join(f"[{a!r},{b!r}]x{n}" for a, b, n in zip(self.lo, self.hi, self.cells))
        return f"{self.dim}d:{axes}"


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Cell averages of a real function on ``grid`` (row-major ``values``)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.size != self.grid.size:
            raise ConfigurationError(
                f"expected {self.grid.size} values for {self.grid.cells}, got {v.size}"
            )
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.shape, float(c)))

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable[..., np.ndarray]) -> "GridFunction":
        """Sample ``fn`` at cell centers (midpoint approximation of the averages)."""
        return cls(grid, np.broadcast_to(fn(*grid.mesh()), grid.shape))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise ConfigurationError("grid functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._other(other))

    def __rsub__(self, other):
        return self.with_values(self._other(other) - self.values)

    def __mul__(self, other):
        return self.with_values(self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def __abs__(self):
        return self.with_values(np.abs(self.values))

    def __repr__(self):
        return f"GridFunction({self.grid.describe()}, min={self.values.min():.6g}, max={self.values.max():.6g})"


@dataclass(frozen=True, order=True)
class Cube:
    """Grid-aligned cube: lowest-corner cell index and side length in cells."""

    anchor: tuple[int, ...]
    side: int

    def __post_init__(self):
        object.__setattr__(self, "anchor", tuple(int(a) for a in np.atleast_1d(self.anchor)))
        object.__setattr__(self, "side", int(self.side))

    @property
    def dim(self) -> int:
        return len(self.anchor)

    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(a, a + self.side) for a in self.anchor)

    def n_cells(self) -> int:
        return self.side**self.dim

    def contains(self, other: "Cube") -> bool:
        return all(
            a <= b and b + other.side <= a + self.side for a, b in zip(self.anchor, other.anchor)
        )

    def bounds(self, grid: Grid) -> list[tuple[float, float]]:
        h = grid.cell_size
        return [
            (grid.lo[i] + a * h[i], grid.lo[i] + (a + self.side) * h[i])
            for i, a in enumerate(self.anchor)
        ]

    def describe(self, grid: Grid | None = None) -> str:
        if grid is None:
            return f"anchor={self.anchor} side={self.side}"
        box = "x".join(f"[{a:.6g},{b:.6g})" for a, b in self.bounds(grid))
        return f"{box} (anchor={self.anchor}, side={self.side})"


class CubeFamily(enum.Enum):
    """Which grid-aligned cubes a supremum ranges over."""

    ALL = "all"
    DYADIC = "dyadic"

    @classmethod
    def parse(cls, text: "str | CubeFamily") -> "CubeFamily":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise ParseError("unknown cube family", text) from None


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def check_family(grid: Grid, family: CubeFamily) -> None:
    if family is CubeFamily.DYADIC and not all(_is_power_of_two(n) for n in grid.cells):
        raise ConfigurationError(
            f"dyadic cubes need power-of-two cell counts, got {grid.cells}"
        )


def check_cube(grid: Grid, cube: Cube) -> None:
    if cube.dim != grid.dim:
        raise GridRangeError(f"cube dimension {cube.dim} does not match grid dimension {grid.dim}")
    if cube.side < 1:
        raise GridRangeError(f"cube side must be >= 1, got {cube.side}")
    for a, n in zip(cube.anchor, grid.cells):
        if a < 0 or a + cube.side > n:
            raise GridRangeError(f"{cube.describe()} does not fit in grid {grid.cells}")


def family_sides(grid: Grid, family: CubeFamily) -> list[int]:
    check_family(grid, family)
    m = grid.max_side()
    if family is CubeFamily.DYADIC:
        return [1 << k for k in range(m.bit_length()) if (1 << k) <= m]
    return list(range(1, m + 1))


def enumerate_cubes(grid: Grid, family: CubeFamily = CubeFamily.ALL) -> Iterator[Cube]:
    """Yield every cube of ``family`` once: increasing side, then row-major anchor."""
    for s in family_sides(grid, family):
        step = s if family is CubeFamily.DYADIC else 1
        ranges = [range(0, n - s + 1, step) for n in grid.cells]
        for anchor in itertools.product(*ranges):
            yield Cube(anchor, s)


def count_cubes(grid: Grid, family: CubeFamily = CubeFamily.ALL) -> int:
    total = 0
    for s in family_sides(grid, family):
        step = s if family is CubeFamily.DYADIC else 1
        total += int(np.prod([(n - s) // step + 1 for n in grid.cells]))
    return total


def cube_sum(values: np.ndarray, cube: Cube) -> float:
    """Sum of ``values`` over ``cube`` in the canonical order."""
    block = np.asarray(values, dtype=float)[cube.slices()]
    if block.ndim == 1:
        return float(np.cumsum(block)[-1])
    rows = np.cumsum(block, axis=1)[:, -1]
    return float(np.cumsum(rows)[-1])


def integrate(f: GridFunction, cube: Cube) -> float:
    """Integral of ``f`` over ``cube``: canonical cell sum times cell volume."""
    check_cube(f.grid, cube)
    return cube_sum(f.values, cube) * f.grid.cell_volume


def average(f: GridFunction, cube: Cube) -> float:
    """Mean of ``f`` over ``cube`` (canonical cell sum over cell count)."""
    check_cube(f.grid, cube)
    return cube_sum(f.values, cube) / cube.n_cells()


def cube_sums(
    grid: Grid,
    family: CubeFamily,
    arrays: Sequence[np.ndarray],
    reducers: Sequence[np.ufunc] | None = None,
) -> Iterator[tuple[int, list[np.ndarray]]]:
    """
    Vectorized canonical reductions of each array over every cube of ``family``.

    Yields ``(side, out)`` for each side in increasing order, where ``out[k]``
    reduces ``arrays[k]`` over every cube of that side with ``reducers[k]``
    (``np.add`` by default, ``np.minimum``/``np.maximum`` also work), laid out
    on the anchor lattice: row-major, anchor spacing ``side`` for DYADIC and
    1 for ALL.  Arrays may carry leading batch axes in front of the grid
    shape; they are reduced independently.
    """
    sides = family_sides(grid, family)
    dyadic = family is CubeFamily.DYADIC
    base = [np.ascontiguousarray(_batched(a, grid)) for a in arrays]
    ops = list(reducers) if reducers is not None else [np.add] * len(base)
    if len(ops) != len(base):
        raise ConfigurationError("one reducer per array is required")
    wanted = set(sides)
    if grid.dim == 1:
        run = [b.copy() for b in base]
        for s in range(1, sides[-1] + 1):
            if s > 1:
                run = [op(r[..., :-1], b[..., s - 1:]) for op, r, b in zip(ops, run, base)]
            if s in wanted:
                yield s, [r[..., ::s] if dyadic else r for r in run]
        return

    n0 = grid.cells[0]
    rows = [b.copy() for b in base]
    for s in range(1, sides[-1] + 1):
        if s > 1:
            rows = [op(r[..., :, :-1], b[..., :, s - 1:]) for op, r, b in zip(ops, rows, base)]
        if s not in wanted:
            continue
        out = []
        for op, r in zip(ops, rows):
            if dyadic:
                r = r[..., :, ::s]
                m = (n0 - s) // s + 1
                acc = r[..., 0 : m * s : s, :].copy()
                for k in range(1, s):
                    acc = op(acc, r[..., k : k + m * s : s, :])
            else:
                m = n0 - s + 1
                acc = r[..., 0:m, :].copy()
                for k in range(1, s):
                    acc = op(acc, r[..., k : k + m, :])
            out.append(acc)
        yield s, out


def _batched(a, grid: Grid) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape[a.ndim - grid.dim:] != grid.shape:
        a = a.reshape(grid.shape)
    return a


def grid_total(values: np.ndarray, dim: int) -> np.ndarray:
    """Canonical-order sum over the trailing ``dim`` axes (batch axes kept)."""
    v = np.asarray(values, dtype=float)
    if dim == 2:
        v = np.cumsum(v, axis=-1)[..., -1]
    return np.cumsum(v, axis=-1)[..., -1]


def _anchor_of(flat: int, shape: tuple[int, ...], side: int, dyadic: bool) -> tuple[int, ...]:
    idx = np.unravel_index(flat, shape)
    step = side if dyadic else 1
    return tuple(int(i) * step for i in idx)


def scan_max(
    grid: Grid,
    family: CubeFamily,
    arrays: Sequence[np.ndarray],
    combine: Callable[[int, list[np.ndarray]], np.ndarray],
    reducers: Sequence[np.ufunc] | None = None,
) -> tuple[float, Cube]:
    """
    Maximize a cube functional built from canonical cube sums.

    ``combine(side, sums)`` maps the sums yielded by `cube_sums` to the
    functional's values on the anchor lattice.  Ties resolve to the first cube
    in enumeration order.
    """
    dyadic = family is CubeFamily.DYADIC
    best = -np.inf
    witness = None
    for s, sums in cube_sums(grid, family, arrays, reducers):
        vals = np.asarray(combine(s, sums), dtype=float)
        if np.isnan(vals).any():
            raise ValueError(f"cube functional produced NaN for side {s}")
        k = int(np.argmax(vals))
        v = float(vals.flat[k])
        if witness is None or v > best:
            best = v
            witness = Cube(_anchor_of(k, vals.shape, s, dyadic), s)
    return best, witness


def sup_over_cubes(
    grid: Grid,
    family: CubeFamily,
    functional: Callable[[Cube], float],
    threads: int | None = None,
) -> tuple[float, Cube]:
    """
    Maximum of an arbitrary cube functional with its first maximizing cube.

    The cubes may be evaluated by several threads; the reduction runs in
    enumeration order, so the result does not depend on scheduling.
    """
    cubes = list(enumerate_cubes(grid, family))
    workers = thread_count() if threads is None else max(1, threads)
    if workers > 1 and len(cubes) > 256:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(functional, cubes, chunksize=max(1, len(cubes) // (4 * workers))))
    else:
        values = [functional(q) for q in cubes]
    best, witness = -np.inf, None
    for q, v in zip(cubes, values):
        v = float(v)
        if np.isnan(v):
            raise ValueError(f"cube functional produced NaN on {q.describe()}")
        if witness is None or v > best:
            best, witness = v, q
    return best, witness


def write_grid(f: GridFunction, path) -> None:
    g = f.grid
    axes = " ".join(f"{a!r} {b!r} {n}" for a, b, n in zip(g.lo, g.hi, g.cells))
    body = "\n".join(" ".join(repr(float(v)) for v in row) for row in np.atleast_2d(f.values))
    with open(path, "w") as fh:
        fh.write(f"{GRID_MAGIC}\n{g.dim}\n{axes}\n{body}\n")


def parse_grid_text(text: str) -> GridFunction:
    lines = text.splitlines()
    if not lines or lines[0].strip() != GRID_MAGIC:
        raise ParseError("bad grid file magic", lines[0] if lines else "")
    if len(lines) < 3:
        raise ParseError("truncated grid file header")
    try:
        dim = int(lines[1].strip())
    except ValueError:
        raise ParseError("bad dimension line", lines[1]) from None
    triples = lines[2].split()
    if len(triples) != 3 * dim:
        raise ParseError(f"expected {dim} 'lo hi cells' triples", lines[2])
    try:
        lo = [float(triples[3 * i]) for i in range(dim)]
        hi = [float(triples[3 * i + 1]) for i in range(dim)]
        cells = [int(triples[3 * i + 2]) for i in range(dim)]
    except ValueError:
        raise ParseError("bad axis triple", lines[2]) from None
    grid = Grid(tuple(lo), tuple(hi), tuple(cells))
    tokens = " ".join(lines[3:]).split()
    if len(tokens) != grid.size:
        raise ParseError(f"expected {grid.size} cell values, found {len(tokens)}")
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise ParseError("bad cell value", str(exc)) from None
    return GridFunction(grid, values)


def read_grid(path) -> GridFunction:
    with open(path) as fh:
        return parse_grid_text(fh.read())
