"""
Discrete operators on cell-average grid functions.

The maximal function reuses the cube-sum engine, so its values are exact
maxima of the same averages the norm scans see.  Singular integrals use the
midpoint rule over cell centers with zero extension outside the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.signal import fftconvolve, convolve

from .errors import ConfigurationError, DimensionError, DomainError
from .grid import CubeFamily, Grid, GridFunction, check_family, cube_sums
from .profiles import PsiProfile, RadialProfile


def _spread_max_1d(avg: np.ndarray, side: int, n: int, axis: int) -> np.ndarray:
    """For every cell, max of the anchor-lattice values over windows containing it."""
    pad_shape = list(avg.shape)
    pad_shape[axis] = n + side - 1
    pad = np.full(pad_shape, -np.inf)
    idx = [slice(None)] * avg.ndim
    idx[axis] = slice(side - 1, side - 1 + avg.shape[axis])
    pad[tuple(idx)] = avg
    out = ndimage.maximum_filter1d(pad, size=side, axis=axis, mode="constant", cval=-np.inf)
    idx[axis] = slice(side // 2, side // 2 + n)
    return out[tuple(idx)]


def maximal(f: GridFunction, family: CubeFamily = CubeFamily.ALL) -> GridFunction:
    """Uncentered maximal function: max of ``avg_Q |f|`` over family cubes containing each cell."""
    grid = f.grid
    family = CubeFamily.parse(family)
    check_family(grid, family)
    absf = np.abs(f.values)
    best = np.full(grid.shape, -np.inf)
    for s, (S,) in cube_sums(grid, family, [absf]):
        avg = S / float(s**grid.dim)
        if family is CubeFamily.DYADIC:
            spread = avg
            for ax in range(grid.dim):
                spread = np.repeat(spread, s, axis=ax)
        else:
            spread = avg
            for ax in range(grid.dim):
                spread = _spread_max_1d(spread, s, grid.cells[ax], ax)
        best = np.maximum(best, spread)
    return f.with_values(best)


def _check_method(method: str) -> None:
    if method not in ("direct", "fft"):
        raise ConfigurationError(f"method must be 'direct' or 'fft', got {method!r}")


def hilbert(f: GridFunction, method: str = "direct") -> GridFunction:
    """
    Principal-value Hilbert transform by the midpoint rule.

    ``Hf(x_c) = (1/pi) sum_{c' != c} f_c' / (c - c')``; the grid spacing
    cancels.  The direct path pairs offsets ``+d`` and ``-d`` so that the
    transform of an even function is exactly odd and vice versa.
    """
    if f.grid.dim != 1:
        raise DimensionError("the Hilbert transform is one-dimensional")
    _check_method(method)
    v = f.values
    n = v.size
    if method == "fft":
        d = np.arange(-(n - 1), n, dtype=float)
        k = np.zeros_like(d)
        k[d != 0] = 1.0 / d[d != 0]
        out = fftconvolve(v, k)[n - 1 : 2 * n - 1]
        return f.with_values(out / math.pi)
    fp = np.concatenate([np.zeros(n), v, np.zeros(n)])
    acc = np.zeros(n)
    for d in range(1, n):
        acc = acc + (fp[n - d : 2 * n - d] - fp[n + d : 2 * n + d]) / d
    return f.with_values(acc / math.pi)


RIESZ_C2 = 1.0 / (2.0 * math.pi)


def _riesz_kernel(grid: Grid, j: int) -> np.ndarray:
    n0, n1 = grid.cells
    h0, h1 = grid.cell_size
    d0 = np.arange(-(n0 - 1), n0)[:, None] * h0
    d1 = np.arange(-(n1 - 1), n1)[None, :] * h1
    r = np.hypot(d0, d1)
    num = d0 if j == 1 else d1
    with np.errstate(divide="ignore", invalid="ignore"):
        k = RIESZ_C2 * num / r**3 * grid.cell_volume
    k[n0 - 1, n1 - 1] = 0.0
    return np.broadcast_to(k, r.shape).copy()


def riesz(f: GridFunction, j: int, method: str = "direct") -> GridFunction:
    """
    Riesz transform ``R_j`` on a 2D grid, ``j`` in {1, 2}.

    Kernel ``c_2 (x_j - y_j)/|x - y|^3`` with ``c_2 = 1/(2 pi)``, integrated
    by the midpoint rule and excluding the diagonal cell.
    """
    if f.grid.dim != 2:
        raise DimensionError("the Riesz transforms here are two-dimensional")
    if j not in (1, 2):
        raise DomainError(f"Riesz index must be 1 or 2, got {j}")
    _check_method(method)
    grid = f.grid
    n0, n1 = grid.cells
    K = _riesz_kernel(grid, j)
    v = f.values
    if method == "fft":
        out = fftconvolve(v, K)[n0 - 1 : 2 * n0 - 1, n1 - 1 : 2 * n1 - 1]
        return f.with_values(out)
    fp = np.zeros((3 * n0, 3 * n1))
    fp[n0 : 2 * n0, n1 : 2 * n1] = v
    acc = np.zeros(grid.shape)
    # half-plane of offsets; the kernel is odd so each pair is k * (f[c-d] - f[c+d])
    for a in range(0, n0):
        for b in range(-(n1 - 1), n1):
            if a == 0 and b <= 0:
                continue
            k = K[n0 - 1 + a, n1 - 1 + b]
            if k == 0.0:
                continue
            minus = fp[n0 - a : 2 * n0 - a, n1 - b : 2 * n1 - b]
            plus = fp[n0 + a : 2 * n0 + a, n1 + b : 2 * n1 + b]
            acc = acc + k * (minus - plus)
    return f.with_values(acc)


def convolve_radial(f: GridFunction, profile: RadialProfile, eps: float) -> GridFunction:
    """``Phi_eps * f`` with zero extension, kernel from cell integrals of ``Phi_eps``."""
    K = profile.kernel(f.grid, eps)
    out = convolve(f.values, K, mode="same", method="direct")
    return f.with_values(out)


def domination_slack(K: np.ndarray, max_side: int) -> float:
    """
    ``eta`` with ``|K * f| <= (1 + eta) Mf`` for the ALL-cube maximal function.

    Layer-cake over the kernel's level sets: a level set with ``m`` cells and
    Chebyshev radius ``r`` sits in a cube of side ``2r + 1`` (capped by the
    grid), so it contributes at most ``side^n / m`` times its mass share.
    """
    dim = K.ndim
    center = np.array([(s - 1) // 2 for s in K.shape])
    offsets = np.indices(K.shape).reshape(dim, -1).T - center
    cheb = np.abs(offsets).max(axis=1)
    flat = K.ravel()
    worst = 1.0
    for level in np.unique(flat[flat > 0]):
        inside = flat >= level
        side = min(2 * int(cheb[inside].max()) + 1, max_side)
        worst = max(worst, side**dim / int(inside.sum()))
    return worst - 1.0


@dataclass(frozen=True)
class DominationReport:
    """Outcome of comparing ``|Phi_eps * f|`` with ``Mf`` cellwise."""

    eta: float
    max_violation: float
    max_ratio: float
    c1: float
    c2: float

    @property
    def holds(self) -> bool:
        return self.max_violation <= 1e-9


def profile_minorant(profile: RadialProfile) -> tuple[float, float]:
    """Constants with ``Phi >= c1 * indicator(|x| < c2)``."""
    c2 = 0.5 * profile.radius if math.isfinite(profile.radius) else 1.0
    c1 = float(profile(np.array(c2)))
    r = np.linspace(0.0, c2, 1001)[:-1]
    if np.any(profile(r) < c1):
        c1 = float(profile(r).min())
    return c1, c2


def maximal_dominates_profiles(
    f: GridFunction, profile: RadialProfile, eps: float
) -> DominationReport:
    """Check ``|Phi_eps * f| <= (1 + eta) Mf`` on every cell."""
    grid = f.grid
    K = profile.kernel(grid, eps)
    eta = domination_slack(K, grid.max_side())
    T = np.abs(convolve(f.values, K, mode="same", method="direct"))
    M = maximal(f, CubeFamily.ALL).values
    viol = float(np.max(T - (1.0 + eta) * M))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(M > 0, T / M, 0.0)
    c1, c2 = profile_minorant(profile)
    return DominationReport(eta, viol, float(ratio.max()), c1, c2)


def _interp_cells(f: GridFunction, points: tuple[np.ndarray, ...]) -> np.ndarray:
    """Multilinear interpolation between cell centers, clamped at the boundary."""
    grid = f.grid
    if grid.dim == 1:
        return np.interp(points[0], grid.centers(0), f.values)
    idx, wts = [], []
    for ax, x in enumerate(points):
        c = grid.centers(ax)
        n = c.size
        if n == 1:
            idx.append(np.zeros(x.shape, dtype=int))
            wts.append(np.zeros(x.shape))
            continue
        u = (np.clip(x, c[0], c[-1]) - c[0]) / grid.cell_size[ax]
        i = np.clip(np.floor(u).astype(int), 0, n - 2)
        idx.append(i)
        wts.append(u - i)
    v = f.values
    i0, i1 = idx
    t0, t1 = wts
    j0 = np.minimum(i0 + 1, grid.cells[0] - 1)
    j1 = np.minimum(i1 + 1, grid.cells[1] - 1)
    return (
        (1 - t0) * (1 - t1) * v[i0, i1]
        + t0 * (1 - t1) * v[j0, i1]
        + (1 - t0) * t1 * v[i0, j1]
        + t0 * t1 * v[j0, j1]
    )


def _ordered_sum(terms: np.ndarray) -> np.ndarray:
    # sequential along the node axis, independent of BLAS threading
    return np.cumsum(terms, axis=0)[-1]


def hardy_average(f: GridFunction, psi: PsiProfile) -> GridFunction:
    """
    ``U f(x) = int_0^1 f(t x) psi(t) dt`` by the midpoint rule in ``t``.

    ``f(t x)`` is interpolated between cell centers, so the grid box must
    contain the origin for the contracted points to stay inside it.
    """
    grid = f.grid
    if not grid.contains_origin():
        raise DomainError("the Hardy average needs a grid box containing the origin")
    t = psi.t()
    w = psi.weights()
    keep = w != 0
    t, w = t[keep], w[keep]
    if t.size == 0:
        return f.with_values(np.zeros(grid.shape))
    centers = grid.mesh()
    out = np.zeros(grid.shape)
    chunk = max(1, 2**22 // grid.size)
    for lo in range(0, t.size, chunk):
        tk = t[lo : lo + chunk].reshape((-1,) + (1,) * grid.dim)
        wk = w[lo : lo + chunk].reshape(tk.shape)
        vals = _interp_cells(f, tuple(tk * c[None] for c in centers))
        part = _ordered_sum(np.concatenate([out[None], wk * vals], axis=0))
        out = part
    return f.with_values(out)


@dataclass(frozen=True)
class CesaroResult:
    """Values of ``V f`` and, per cell, the share of quadrature weight whose point left the grid."""

    values: GridFunction
    escape: np.ndarray

    def exact_cells(self) -> np.ndarray:
        return self.escape == 0.0


def _zero_extended(f: GridFunction, points: tuple[np.ndarray, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Interpolated values at ``points``, zero outside the box, with the outside mask."""
    grid = f.grid
    outside = np.zeros(points[0].shape, dtype=bool)
    for ax, x in enumerate(points):
        outside |= (x < grid.lo[ax]) | (x > grid.hi[ax])
    vals = _interp_cells(f, points)
    return np.where(outside, 0.0, vals), outside


def cesaro_average(f: GridFunction, psi: PsiProfile) -> CesaroResult:
    """
    ``V f(x) = int_0^1 f(x/t) t^(-n) psi(t) dt`` with ``f`` extended by zero.

    Dilated points falling outside the box are dropped; the returned escape
    fraction tells which cells were computed without truncation.
    """
    grid = f.grid
    if not grid.contains_origin():
        raise DomainError("the Cesaro average needs a grid box containing the origin")
    n = grid.dim
    t = psi.t()
    w = psi.weights() * t ** (-float(n))
    keep = w != 0
    t, w = t[keep], w[keep]
    centers = grid.mesh()
    out = np.zeros(grid.shape)
    lost = np.zeros(grid.shape)
    total = float(np.sum(w)) if w.size else 0.0
    chunk = max(1, 2**22 // grid.size)
    for lo in range(0, t.size, chunk):
        tk = t[lo : lo + chunk].reshape((-1,) + (1,) * n)
        wk = w[lo : lo + chunk].reshape(tk.shape)
        vals, outside = _zero_extended(f, tuple(c[None] / tk for c in centers))
        out = _ordered_sum(np.concatenate([out[None], wk * vals], axis=0))
        lost = _ordered_sum(np.concatenate([lost[None], np.where(outside, wk, 0.0)], axis=0))
    escape = lost / total if total > 0 else np.zeros(grid.shape)
    return CesaroResult(f.with_values(out), escape)
