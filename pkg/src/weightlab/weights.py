"""
Weights and their Muckenhoupt constants.

A weight is a nonnegative grid function.  Power weights ``|x|**a`` carry an
analytic descriptor and store exact cell averages, which keeps their
integrals exact even when the weight is singular at the origin.

The A_p, A_1 and A_infinity constants are suprema of cube functionals taken
over a finite cube family; on a bounded grid they are lower bounds for the
continuum constants.  Each constant comes back with a witness cube, and
re-evaluating the functional on that cube with `ap_functional`,
`a1_functional` or `ainfty_functional` reproduces the value exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import integrate as _quad

from .errors import ConfigurationError, DegenerateWeightError, DomainError
from .grid import Cube, CubeFamily, Grid, GridFunction, check_cube, cube_sum, integrate, scan_max


@dataclass(frozen=True)
class ConjugateExponent:
    p: float
    p_prime: float


def conjugate(p: float) -> ConjugateExponent:
    """Hoelder conjugate: ``1/p + 1/p' = 1``, with 1 and infinity paired."""
    p = float(p)
    if math.isnan(p) or p < 1:
        raise DomainError(f"exponent must be >= 1, got {p}")
    if p == 1:
        return ConjugateExponent(1.0, math.inf)
    if math.isinf(p):
        return ConjugateExponent(math.inf, 1.0)
    return ConjugateExponent(p, p / (p - 1.0))


def _power_antiderivative(x: np.ndarray, a: float) -> np.ndarray:
    if a == -1.0:
        return np.sign(x) * np.log(np.abs(x))
    return np.sign(x) * np.abs(x) ** (a + 1.0) / (a + 1.0)


def power_cell_averages_1d(edges: np.ndarray, a: float) -> np.ndarray:
    """Exact averages of ``|x|**a`` over the consecutive intervals in ``edges``."""
    edges = np.asarray(edges, dtype=float)
    if a <= -1.0 and edges[0] <= 0.0 <= edges[-1]:
        raise DomainError(f"|x|^{a} is not integrable near 0 (need a > -1)")
    F = _power_antiderivative(edges, a)
    return (F[1:] - F[:-1]) / np.diff(edges)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _gl_cell_average_2d(x0, x1, y0, y1, a, split):
    # composite Gauss-Legendre on split x split sub-cells
    xs = np.linspace(x0, x1, split + 1)
    ys = np.linspace(y0, y1, split + 1)
    total = 0.0
    for i in range(split):
        for j in range(split):
            cx, hx = 0.5 * (xs[i] + xs[i + 1]), 0.5 * (xs[i + 1] - xs[i])
            cy, hy = 0.5 * (ys[j] + ys[j + 1]), 0.5 * (ys[j + 1] - ys[j])
            X = cx + hx * _GL_NODES[:, None]
            Y = cy + hy * _GL_NODES[None, :]
            r = np.hypot(X, Y)
            total += hx * hy * np.sum(_GL_WEIGHTS[:, None] * _GL_WEIGHTS[None, :] * r**a)
    return total / ((x1 - x0) * (y1 - y0))


def power_cell_averages_2d(grid: Grid, a: float) -> np.ndarray:
    """Averages of ``|x|**a`` (Euclidean norm) over the cells of a 2D grid."""
    if a <= -2.0 and grid.contains_origin():
        raise DomainError(f"|x|^{a} is not integrable near 0 in 2D (need a > -2)")
    ex, ey = grid.edges(0), grid.edges(1)
    hx, hy = grid.cell_size
    out = np.empty(grid.shape)
    for i in range(grid.cells[0]):
        for j in range(grid.cells[1]):
            x0, x1, y0, y1 = ex[i], ex[i + 1], ey[j], ey[j + 1]
            dx = 0.0 if x0 <= 0.0 <= x1 else min(abs(x0), abs(x1))
            dy = 0.0 if y0 <= 0.0 <= y1 else min(abs(y0), abs(y1))
            near = math.hypot(dx, dy)
            if dx == 0.0 and dy == 0.0:
                out[i, j] = _singular_cell_average(x0, x1, y0, y1, a)
            elif near < 2.0 * math.hypot(hx, hy):
                out[i, j] = _gl_cell_average_2d(x0, x1, y0, y1, a, 6)
            else:
                out[i, j] = _gl_cell_average_2d(x0, x1, y0, y1, a, 1)
    return out


def _singular_cell_average(x0, x1, y0, y1, a):
    # split the cell at the origin so every piece has the singularity at a corner
    total = 0.0
    for xa, xb in ((x0, 0.0), (0.0, x1)):
        for ya, yb in ((y0, 0.0), (0.0, y1)):
            if xb - xa <= 0.0 or yb - ya <= 0.0:
                continue
            val, _ = _quad.dblquad(
                lambda y, x: math.hypot(x, y) ** a, xa, xb, ya, yb, epsabs=0.0, epsrel=1e-12
            )
            total += val
    return total / ((x1 - x0) * (y1 - y0))


@lru_cache(maxsize=32)
def _cached_power_values(grid: Grid, a: float) -> np.ndarray:
    if grid.dim == 1:
        return power_cell_averages_1d(grid.edges(0), a)
    return power_cell_averages_2d(grid, a)


@dataclass(frozen=True)
class Weight:
    """A nonnegative grid function, optionally tagged as the power weight ``|x|**a``."""

    function: GridFunction
    power: float | None = None
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if np.any(self.function.values < 0):
            raise ConfigurationError("weights must be nonnegative")

    @classmethod
    def from_values(cls, grid: Grid, values) -> "Weight":
        return cls(GridFunction(grid, values))

    @classmethod
    def constant(cls, grid: Grid, c: float = 1.0) -> "Weight":
        return cls(GridFunction.constant(grid, c), label=f"const:{float(c)!r}")

    @classmethod
    def power_law(cls, grid: Grid, a: float) -> "Weight":
        """``|x|**a`` with exact cell averages."""
        a = float(a)
        return cls(GridFunction(grid, _cached_power_values(grid, a)), power=a, label=f"power:{a!r}")

    @classmethod
    def step(cls, grid: Grid, left: float, right: float, x0: float) -> "Weight":
        """``left`` for first coordinate < x0, ``right`` beyond; exact cell averages."""
        e = grid.edges(0)
        frac = np.clip((x0 - e[:-1]) / np.diff(e), 0.0, 1.0)
        v = frac * left + (1.0 - frac) * right
        # cells entirely on one side keep the exact level
        v = np.where(frac == 1.0, left, np.where(frac == 0.0, right, v))
        if grid.dim == 2:
            v = np.repeat(v[:, None], grid.cells[1], axis=1)
        return cls(GridFunction(grid, v), label=f"step:{float(left)!r},{float(right)!r}@{float(x0)!r}")

    def labelled(self, label: str) -> "Weight":
        return replace(self, label=label)

    @property
    def grid(self) -> Grid:
        return self.function.grid

    @property
    def values(self) -> np.ndarray:
        return self.function.values

    def scaled(self, c: float) -> "Weight":
        return Weight(self.function * c, None)

    def describe(self) -> str:
        if self.label is not None:
            return self.label
        if self.power is not None:
            return f"power:{self.power!r}"
        return f"table[{self.grid.size} cells]"


def _require_positive(w: Weight, what: str) -> None:
    if np.any(w.values <= 0):
        raise DegenerateWeightError(
            f"{what} needs a strictly positive weight; regularize with "
            "dual_weight(w, p, eps) for some eps > 0"
        )


def weighted_measure(w: Weight, cube: Cube) -> float:
    """``w(Q)``, the integral of the weight over the cube."""
    return integrate(w.function, cube)


def dual_weight(w: Weight, p: float, eps: float = 0.0) -> Weight:
    """Cellwise ``(w + eps) ** (1 - p')``."""
    if not p > 1:
        raise DomainError(f"dual weight needs p > 1, got {p}")
    if eps < 0:
        raise DomainError(f"eps must be >= 0, got {eps}")
    v = w.values + eps if eps > 0 else w.values
    if np.any(v <= 0):
        raise DegenerateWeightError(
            "weight vanishes on some cell; pass eps > 0 to use (w + eps)^(1 - p')"
        )
    e = 1.0 - conjugate(p).p_prime
    return Weight(w.function.with_values(v**e))


def _ap_combine(n, s_w, s_dual, p):
    return (s_w / n) * (s_dual / n) ** (p - 1.0)


def _a1_combine(n, s_w, m):
    return (s_w / n) / m


def _ainfty_combine(n, s_w, s_neglog):
    return (s_w / n) * np.exp(s_neglog / n)


def _log_inverse(values):
    return -np.log(values)


def ap_constant(
    w: Weight, p: float, family: CubeFamily = CubeFamily.ALL
) -> tuple[float, Cube]:
    """``sup_Q (avg_Q w) (avg_Q w^(1-p'))^(p-1)`` with a witness cube."""
    if not p > 1:
        raise DomainError(f"A_p constant needs p > 1, got {p}")
    _require_positive(w, "the A_p constant")
    sigma = dual_weight(w, p).values
    dim = w.grid.dim
    return scan_max(
        w.grid, family, [w.values, sigma],
        lambda s, S: _ap_combine(float(s**dim), S[0], S[1], p),
    )


def ap_functional(w: Weight, p: float, cube: Cube) -> float:
    check_cube(w.grid, cube)
    sigma = dual_weight(w, p).values
    n = float(cube.n_cells())
    s_w = np.array([cube_sum(w.values, cube)])
    s_d = np.array([cube_sum(sigma, cube)])
    return float(_ap_combine(n, s_w, s_d, p)[0])


def a1_constant(w: Weight, family: CubeFamily = CubeFamily.ALL) -> tuple[float, Cube]:
    """``sup_Q (avg_Q w) / min_Q w``, the cell minimum standing in for ess inf."""
    _require_positive(w, "the A_1 constant")
    dim = w.grid.dim
    return scan_max(
        w.grid, family, [w.values, w.values],
        lambda s, S: _a1_combine(float(s**dim), S[0], S[1]),
        reducers=[np.add, np.minimum],
    )


def a1_functional(w: Weight, cube: Cube) -> float:
    check_cube(w.grid, cube)
    n = float(cube.n_cells())
    s_w = np.array([cube_sum(w.values, cube)])
    m = np.array([w.values[cube.slices()].min()])
    return float(_a1_combine(n, s_w, m)[0])


def ainfty_constant(w: Weight, family: CubeFamily = CubeFamily.ALL) -> tuple[float, Cube]:
    """``sup_Q (avg_Q w) exp(avg_Q log(1/w))`` on cell values."""
    _require_positive(w, "the A_infinity constant")
    dim = w.grid.dim
    return scan_max(
        w.grid, family, [w.values, _log_inverse(w.values)],
        lambda s, S: _ainfty_combine(float(s**dim), S[0], S[1]),
    )


def ainfty_functional(w: Weight, cube: Cube) -> float:
    check_cube(w.grid, cube)
    n = float(cube.n_cells())
    s_w = np.array([cube_sum(w.values, cube)])
    s_l = np.array([cube_sum(_log_inverse(w.values), cube)])
    return float(_ainfty_combine(n, s_w, s_l)[0])


def power_ap_range(p: float, dim: int = 1) -> tuple[float, float]:
    """Open interval of exponents ``a`` with ``|x|**a`` in A_p on R^dim."""
    if p == 1:
        return (-float(dim), 0.0)
    if math.isinf(p):
        return (-float(dim), math.inf)
    return (-float(dim), dim * (p - 1.0))


def power_in_ap(a: float, p: float, dim: int = 1) -> bool:
    lo, hi = power_ap_range(p, dim)
    if p == 1:
        return lo < a <= hi
    return lo < a < hi
