"""Radial convolution profiles and the ray weights used by the averaging operators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate as _quad
from scipy.special import erf

from .errors import ConfigurationError, DomainError, ParseError
from .grid import Grid


def unit_ball_volume(dim: int) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)


@dataclass(frozen=True)
class RadialProfile:
    """
    Nonnegative, radially non-increasing ``Phi`` with unit mass on R^dim.

    ``shape`` is the unnormalized profile as a function of the radius and
    ``radius`` its support (``inf`` when unbounded); the constructor stores the
    normalizing factor.
    """

    name: str
    dim: int
    shape: Callable[[np.ndarray], np.ndarray]
    radius: float
    scale: float = field(init=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DomainError(f"profiles are defined for dim 1 and 2, got {self.dim}")
        mass = self._shape_mass()
        if not mass > 0:
            raise ConfigurationError(f"profile {self.name} has no mass")
        object.__setattr__(self, "scale", 1.0 / mass)
        r = np.linspace(0.0, min(self.radius, 50.0), 2001)[:-1]
        vals = np.asarray(self.shape(r), dtype=float)
        if np.any(vals < 0):
            raise ConfigurationError(f"profile {self.name} takes negative values")
        if np.any(np.diff(vals) > 1e-12 * max(1.0, vals.max())):
            raise ConfigurationError(f"profile {self.name} is not radially non-increasing")

    def _shape_mass(self) -> float:
        top = self.radius if math.isfinite(self.radius) else np.inf
        if self.dim == 1:
            val, _ = _quad.quad(lambda r: float(self.shape(np.array(r))), 0.0, top, limit=200)
            return 2.0 * val
        val, _ = _quad.quad(lambda r: float(self.shape(np.array(r))) * r, 0.0, top, limit=200)
        return 2.0 * math.pi * val

    def __call__(self, r) -> np.ndarray:
        return self.scale * np.asarray(self.shape(np.asarray(r, dtype=float)), dtype=float)

    def total_mass(self) -> float:
        return self.scale * self._shape_mass()

    @classmethod
    def box(cls, dim: int) -> "RadialProfile":
        return cls("box", dim, lambda r: np.where(np.asarray(r) < 1.0, 1.0, 0.0), 1.0)

    @classmethod
    def tent(cls, dim: int) -> "RadialProfile":
        return cls("tent", dim, lambda r: np.clip(1.0 - np.asarray(r), 0.0, None), 1.0)

    @classmethod
    def gauss_trunc(cls, dim: int, R: float) -> "RadialProfile":
        if not R > 0:
            raise DomainError(f"truncation radius must be > 0, got {R}")
        R = float(R)
        return cls(
            f"gauss-trunc:{R!r}", dim,
            lambda r: np.where(np.asarray(r) < R, np.exp(-0.5 * np.asarray(r) ** 2), 0.0), R,
        )

    def kernel(self, grid: Grid, eps: float, sub: int = 16) -> np.ndarray:
        """
        Cell integrals of ``Phi_eps(y) = eps^-n Phi(y/eps)`` over offset cells.

        Returns an odd-sized array centered on the zero offset, renormalized to
        sum to exactly one so that constants are reproduced.
        """
        if not eps > 0:
            raise DomainError(f"eps must be > 0, got {eps}")
        if grid.dim != self.dim:
            raise ConfigurationError("profile and grid dimensions differ")
        h = grid.cell_size
        reach = self.radius if math.isfinite(self.radius) else 8.0
        half = [min(int(math.ceil(reach * eps / hi + 0.5)), n - 1 + int(math.ceil(reach * eps / hi))) for hi, n in zip(h, grid.cells)]
        frac = (np.arange(sub) + 0.5) / sub - 0.5
        axes = []
        for hi, m in zip(h, half):
            d = np.arange(-m, m + 1)
            axes.append(((d[:, None] + frac[None, :]) * hi))
        if self.dim == 1:
            r = np.abs(axes[0]) / eps
            K = self(r).mean(axis=1) * h[0] / eps
        else:
            X = axes[0][:, None, :, None]
            Y = axes[1][None, :, None, :]
            r = np.hypot(X, Y) / eps
            K = self(r).mean(axis=(2, 3)) * h[0] * h[1] / eps**2
        total = K.sum()
        if not total > 0:
            raise ConfigurationError("kernel has no mass on this grid")
        return K / total


def parse_radial(text: str, dim: int) -> RadialProfile:
    raw = text.strip()
    if raw == "box":
        return RadialProfile.box(dim)
    if raw == "tent":
        return RadialProfile.tent(dim)
    if raw.startswith("gauss-trunc:"):
        tok = raw.split(":", 1)[1]
        try:
            R = float(tok)
        except ValueError:
            raise ParseError("bad truncation radius", tok) from None
        return RadialProfile.gauss_trunc(dim, R)
    raise ParseError("unknown radial profile", raw)


@dataclass(frozen=True)
class PsiProfile:
    """
    A nonnegative function on [0, 1] with a composite midpoint rule of ``nodes`` points.

    ``order_at_zero`` is ``k`` when ``psi(t) ~ t**k`` near 0 and ``None`` when
    psi vanishes on a neighbourhood of 0; it decides integrability of
    ``t**beta * psi``.  ``breaks`` lists interior discontinuities.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    order_at_zero: float | None
    nodes: int = 1024
    breaks: tuple[float, ...] = ()

    def __post_init__(self):
        if self.nodes < 1:
            raise ConfigurationError("need at least one quadrature node")
        if np.any(self(self.t()) < 0):
            raise ConfigurationError(f"psi profile {self.name} is negative on its nodes")

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(self.fn(t), dtype=float), t.shape)

    def with_nodes(self, nodes: int) -> "PsiProfile":
        return PsiProfile(self.name, self.fn, self.order_at_zero, int(nodes), self.breaks)

    def t(self) -> np.ndarray:
        return (np.arange(self.nodes) + 0.5) / self.nodes

    def weights(self) -> np.ndarray:
        """Midpoint weights ``psi(t_k) / K``."""
        return self(self.t()) / self.nodes

    def converges(self, beta: float) -> bool:
        """Whether ``int_0^1 t**beta psi(t) dt`` is finite."""
        if self.order_at_zero is None:
            return True
        return beta + self.order_at_zero > -1.0

    def moment(self, beta: float) -> float:
        """``int_0^1 t**beta psi(t) dt`` by adaptive quadrature."""
        if not self.converges(beta):
            return math.inf
        pts = [b for b in self.breaks if 0.0 < b < 1.0]
        val, _ = _quad.quad(
            lambda t: t**beta * float(self(np.array(t))), 0.0, 1.0,
            points=pts or None, limit=400, epsabs=1e-13, epsrel=1e-12,
        )
        return val

    def midpoint_moment(self, beta: float) -> float:
        t = self.t()
        return float(np.sum(t**beta * self.weights()))

    @classmethod
    def constant(cls, c: float = 1.0, nodes: int = 1024) -> "PsiProfile":
        if c < 0:
            raise DomainError("psi must be nonnegative")
        return cls(f"const:{c!r}", lambda t: np.full_like(t, float(c)), 0.0 if c > 0 else None, nodes)

    @classmethod
    def power(cls, k: float, nodes: int = 1024) -> "PsiProfile":
        return cls(f"poly:{k!r}", lambda t: t ** float(k), float(k), nodes)

    @classmethod
    def box(cls, a: float, b: float, nodes: int = 1024) -> "PsiProfile":
        if not 0.0 <= a < b <= 1.0:
            raise DomainError(f"need 0 <= a < b <= 1, got [{a}, {b}]")
        return cls(
            f"box:{a!r},{b!r}", lambda t: np.where((t >= a) & (t <= b), 1.0, 0.0),
            0.0 if a == 0 else None, nodes, (a, b),
        )

    @classmethod
    def table(cls, t_vals, psi_vals, name: str = "table", nodes: int = 1024) -> "PsiProfile":
        tv = np.asarray(t_vals, dtype=float)
        pv = np.asarray(psi_vals, dtype=float)
        if tv.ndim != 1 or tv.shape != pv.shape or tv.size < 2:
            raise ConfigurationError("table needs matching t and psi columns with >= 2 rows")
        if np.any(np.diff(tv) <= 0) or tv[0] < 0 or tv[-1] > 1:
            raise ConfigurationError("table t values must increase within [0, 1]")
        if np.any(pv < 0):
            raise ConfigurationError("table psi values must be nonnegative")
        lo, hi = tv[0], tv[-1]

        def fn(t):
            return np.where((t >= lo) & (t <= hi), np.interp(t, tv, pv), 0.0)

        if lo > 0 or (pv[0] == 0 and pv[1] == 0):
            order = None
        else:
            order = 0.0 if pv[0] > 0 else 1.0
        return cls(name, fn, order, nodes, (float(lo), float(hi)))


def parse_psi(text: str, nodes: int = 1024) -> PsiProfile:
    raw = text.strip()
    head, _, tail = raw.partition(":")
    try:
        if head == "const":
            return PsiProfile.constant(float(tail), nodes)
        if head == "poly":
            return PsiProfile.power(float(tail), nodes)
        if head == "box":
            a, b = (float(x) for x in tail.split(","))
            return PsiProfile.box(a, b, nodes)
    except ValueError:
        raise ParseError("bad psi parameter", tail) from None
    if head == "table":
        try:
            data = np.loadtxt(tail, ndmin=2)
        except (OSError, ValueError) as exc:
            raise ParseError(f"cannot read psi table ({exc})", tail) from None
        if data.shape[1] != 2:
            raise ParseError("psi table must have two columns", tail)
        return PsiProfile.table(data[:, 0], data[:, 1], f"table:{tail}", nodes)
    raise ParseError("unknown psi profile", raw)
