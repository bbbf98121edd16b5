"""
Theorem checks for Muckenhoupt weights and operator-norm lower bounds.

Every check returns a `TheoremReport` whose rows are inequalities
``lhs <= rhs`` evaluated on the grid.  Operator norms are only ever bounded
from below, by evaluating the operator on explicit test functions.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import (
    ConfigurationError,
    DegenerateWeightError,
    DomainError,
    HypothesisViolation,
)
from .grid import (
    Cube,
    CubeFamily,
    Grid,
    GridFunction,
    check_cube,
    check_family,
    enumerate_cubes,
)
from .norms import (
    NormKind,
    NormSpec,
    bmo_inf_norm,
    bmo_norm,
    evaluate_norm,
    lebesgue_norm,
    morrey_norm,
    weak_lebesgue_norm,
    weak_morrey_norm,
)
from .operators import cesaro_average, hardy_average, maximal
from .profiles import PsiProfile
from .weights import (
    Weight,
    a1_constant,
    ap_constant,
    conjugate,
    dual_weight,
    power_ap_range,
    power_in_ap,
)

ARITH_TOL = 1e-9


class ExtremalKind(enum.Enum):
    DUAL_POWER = "dual_power"
    EPS_DUAL = "eps_dual"
    INDICATOR_SUB = "indicator_sub"
    WEIGHT_ITSELF = "weight_itself"


def _indicator(grid: Grid, cube: Cube) -> np.ndarray:
    m = np.zeros(grid.shape)
    m[cube.slices()] = 1.0
    return m


def extremal_function(
    kind: ExtremalKind,
    w: Weight,
    p: float | None = None,
    cube: Cube | None = None,
    sub: Cube | None = None,
    eps: float = 0.0,
) -> GridFunction:
    """
    Test functions used by the lower-bound arguments.

    ``DUAL_POWER`` is ``(w + eps)^(1-p') chi_Q``; ``EPS_DUAL`` is
    ``(w + eps)^(-p'/p) chi_Q``, the same function written the other way;
    ``INDICATOR_SUB`` is ``chi_{Q1}`` for ``Q1`` inside ``Q``;
    ``WEIGHT_ITSELF`` is the weight.
    """
    kind = ExtremalKind(kind)
    grid = w.grid
    if kind is ExtremalKind.WEIGHT_ITSELF:
        return w.function
    if cube is None:
        raise ConfigurationError(f"{kind.value} needs a cube")
    check_cube(grid, cube)
    if kind is ExtremalKind.INDICATOR_SUB:
        if sub is None or not cube.contains(sub):
            raise ConfigurationError("INDICATOR_SUB needs a sub-cube contained in the cube")
        return GridFunction(grid, _indicator(grid, sub))
    if p is None or not p > 1:
        raise DomainError(f"{kind.value} needs p > 1, got {p}")
    if kind is ExtremalKind.DUAL_POWER:
        dual = dual_weight(w, p, eps).values
    else:
        base = w.values + eps if eps > 0 else w.values
        if np.any(base <= 0):
            raise DegenerateWeightError("weight vanishes on some cell; pass eps > 0")
        pp = conjugate(p).p_prime
        dual = base ** (-pp / p)
    return GridFunction(grid, np.where(_indicator(grid, cube) > 0, dual, 0.0))


@dataclass(frozen=True)
class Trial:
    """A named test function."""

    label: str
    function: GridFunction


@dataclass(frozen=True)
class OperatorNormEstimate:
    """Certified lower bound ``max_trials target(op f) / source(f)``."""

    op_name: str
    source_norm: NormSpec
    target_norm: NormSpec
    lower_bound: float
    witness: str
    trials: int
    ratios: tuple[tuple[str, float], ...] = ()


def estimate_operator_norms(
    op: Callable[[GridFunction], GridFunction],
    w: Weight,
    source: NormSpec,
    targets: Sequence[NormSpec],
    trials: Iterable[Trial],
    family: CubeFamily = CubeFamily.ALL,
    op_name: str = "op",
    target_options: dict | None = None,
) -> list[OperatorNormEstimate]:
    """Lower bounds for several target norms, applying ``op`` once per trial."""
    target_options = target_options or {}
    per_target: list[list[tuple[str, float]]] = [[] for _ in targets]
    used = 0
    for trial in trials:
        src, _ = evaluate_norm(trial.function, w, source, family)
        if not src > 0:
            warnings.warn(f"trial {trial.label} has zero source norm; skipped", stacklevel=2)
            continue
        used += 1
        image = op(trial.function)
        for k, spec in enumerate(targets):
            val, _ = evaluate_norm(image, w, spec, family, **target_options.get(spec.render(), {}))
            per_target[k].append((trial.label, val / src))
    out = []
    for spec, ratios in zip(targets, per_target):
        if ratios:
            k = int(np.argmax([r for _, r in ratios]))
            best, label = ratios[k][1], ratios[k][0]
        else:
            best, label = 0.0, "none"
        out.append(OperatorNormEstimate(op_name, source, spec, best, label, used, tuple(ratios)))
    return out


def estimate_operator_norm(
    op: Callable[[GridFunction], GridFunction],
    w: Weight,
    source: NormSpec,
    target: NormSpec,
    trials: Iterable[Trial],
    family: CubeFamily = CubeFamily.ALL,
    op_name: str = "op",
) -> OperatorNormEstimate:
    """
    Lower bound for ``||op||_{source -> target}`` from explicit trials.

    Trials with zero source norm are skipped with a warning; adding trials can
    only raise the bound.
    """
    return estimate_operator_norms(op, w, source, [target], trials, family, op_name)[0]


def dual_power_trials(w: Weight, p: float, cubes: Iterable[Cube]) -> list[Trial]:
    grid = w.grid
    return [
        Trial(f"dual_power {q.describe(grid)}", extremal_function(ExtremalKind.DUAL_POWER, w, p, q))
        for q in cubes
    ]


@dataclass(frozen=True)
class InequalityRow:
    """``lhs <= rhs`` with slack ``rhs - lhs``."""

    name: str
    lhs: float
    rhs: float
    passed: bool
    note: str = ""

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def inequality(name: str, lhs: float, rhs: float, tol: float = ARITH_TOL, note: str = "") -> InequalityRow:
    """Row that passes when ``lhs <= rhs`` up to ``tol`` relative to the larger side."""
    lhs, rhs = float(lhs), float(rhs)
    scale = max(1.0, abs(lhs), abs(rhs)) if math.isfinite(rhs) else 1.0
    return InequalityRow(name, lhs, rhs, bool(lhs <= rhs + tol * scale), note)


@dataclass
class TheoremReport:
    """Inequality rows plus the hypotheses needed to rerun the check."""

    theorem: str
    hypotheses: dict
    rows: list[InequalityRow] = field(default_factory=list)
    values: dict = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    sweep: list[dict] | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def flag(self, message: str) -> None:
        warnings.warn(message, stacklevel=3)
        self.flags.append(message)


def _hyp(w: Weight, family: CubeFamily, **extra) -> dict:
    out = {"weight": w.describe(), "grid": w.grid.describe(), "family": family.value}
    out.update(extra)
    return out


def check_thm16_sandwich(w: Weight, p: float, family: CubeFamily = CubeFamily.ALL) -> TheoremReport:
    """
    ``[w]_{A_p}^{1/p} <= ||w||_{BMO^{p'}(w)} + 1 <= 3 [w]_{A_p}^{1/p}``.

    At ``p = 1`` the constant is ``[w]_{A_1}`` and the norm is BMO^inf; the
    report then also carries the bounds the argument gives directly:
    ``||w|| <= 1 + [w]_{A_1}`` and ``[w]_{A_1} <= 1 + ||w||``.
    """
    family = CubeFamily.parse(family)
    rep = TheoremReport("thm16", _hyp(w, family, p=p))
    if p == 1:
        A, qa = a1_constant(w, family)
        B = bmo_inf_norm(w.function, w, family)
        root = A
        rep.rows += [
            inequality("A^(1/p) <= ||w||+1", root, B + 1.0),
            inequality("||w||+1 <= 3 A^(1/p)", B + 1.0, 3.0 * root),
            inequality("||w|| <= 1+[w]_A1", B, 1.0 + A),
            inequality("[w]_A1 <= 1+||w||", A, 1.0 + B),
        ]
    else:
        if not p > 1:
            raise DomainError(f"p must be >= 1, got {p}")
        pp = conjugate(p).p_prime
        A, qa = ap_constant(w, p, family)
        B = bmo_norm(w.function, w, pp, family)
        root = A ** (1.0 / p)
        rep.rows += [
            inequality("A^(1/p) <= ||w||+1", root, B + 1.0),
            inequality("||w||+1 <= 3 A^(1/p)", B + 1.0, 3.0 * root),
            inequality("||w||+1 <= A^(1/p)+2", B + 1.0, root + 2.0),
        ]
    rep.values.update(constant=A, witness=qa.describe(w.grid), bmo=B)
    return rep


def check_prop31_abs(
    f: GridFunction, w: Weight, p: float, family: CubeFamily = CubeFamily.ALL
) -> TheoremReport:
    """
    ``|| |f| ||_{BMO^{p'}(w)} <= (1 + [w]_{A_p}^{1/p}) ||f||_{BMO^{p'}(w)}``.

    ``p = 1`` uses ``[w]_{A_1}`` and BMO^inf; ``p = inf`` uses BMO^1 with the
    factor 2, which holds for every weight.
    """
    family = CubeFamily.parse(family)
    rep = TheoremReport("prop31", _hyp(w, family, p=p))
    absf = abs(f)
    if p == 1:
        A, _ = a1_constant(w, family)
        lhs = bmo_inf_norm(absf, w, family)
        norm_f = bmo_inf_norm(f, w, family)
        factor = 1.0 + A
    elif math.isinf(p):
        lhs = bmo_norm(absf, w, 1.0, family)
        norm_f = bmo_norm(f, w, 1.0, family)
        A, factor = math.nan, 2.0
    else:
        if not p > 1:
            raise DomainError(f"p must be >= 1, got {p}")
        pp = conjugate(p).p_prime
        A, _ = ap_constant(w, p, family)
        lhs = bmo_norm(absf, w, pp, family)
        norm_f = bmo_norm(f, w, pp, family)
        factor = 1.0 + A ** (1.0 / p)
    rep.rows.append(inequality("|| |f| || <= (1+A^(1/p)) ||f||", lhs, factor * norm_f))
    rep.values.update(constant=A, norm_abs=lhs, norm_f=norm_f, factor=factor)
    return rep


def _require_power(w: Weight) -> float:
    if w.power is None:
        raise ConfigurationError("this check needs a power weight |x|^alpha")
    return w.power


def _smoothed_random(grid: Grid, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    sigma = [max(1.0, n / 32) for n in grid.cells]
    out = []
    for _ in range(count):
        out.append(gaussian_filter(rng.standard_normal(grid.shape), sigma=sigma, mode="constant"))
    return out


def _coarse_dyadic_cubes(grid: Grid, min_side: int) -> list[Cube]:
    m = grid.max_side()
    cubes, s = [], max(1, min_side)
    while s <= m:
        ranges = [range(0, n - s + 1, s) for n in grid.cells]
        for anchor in np.ndindex(*[len(r) for r in ranges]):
            cubes.append(Cube(tuple(r[i] for r, i in zip(ranges, anchor)), s))
        s *= 2
    return cubes


def upsi_battery(w: Weight, p: float, seed: int = 42) -> list[Trial]:
    """
    Test functions for the U_psi upper-bound scan.

    The weight itself, indicators and dual powers of dyadic-aligned cubes of
    side at least 1/64 of the grid, and 32 seeded smoothed random functions.
    """
    grid = w.grid
    trials = [Trial("weight", w.function)]
    dual_exp = conjugate(p).p if p > 1 else 2.0
    for q in _coarse_dyadic_cubes(grid, grid.max_side() // 64):
        ind = _indicator(grid, q)
        trials.append(Trial(f"indicator {q.describe(grid)}", GridFunction(grid, ind)))
        if np.all(w.values > 0):
            trials.append(Trial(
                f"dual_power {q.describe(grid)}",
                extremal_function(ExtremalKind.DUAL_POWER, w, dual_exp, q),
            ))
    rng = np.random.default_rng(seed)
    for k, v in enumerate(_smoothed_random(grid, rng, 32)):
        trials.append(Trial(f"random#{k}", GridFunction(grid, v)))
    return trials


def check_thm18_upsi(
    w: Weight,
    psi: PsiProfile,
    p: float,
    family: CubeFamily = CubeFamily.ALL,
    tol: float = 0.01,
    battery: bool = True,
    seed: int = 42,
) -> TheoremReport:
    """
    ``||U_psi||_{BMO^p(w)} = int_0^1 t^alpha psi(t) dt`` for ``w = |x|^alpha``.

    Rows: the witness ratio ``||U_psi w|| / ||w||`` equals the integral within
    relative ``tol``, and no battery function exceeds it by more than ``tol``.
    """
    family = CubeFamily.parse(family)
    alpha = _require_power(w)
    grid = w.grid
    rep = TheoremReport("thm18", _hyp(w, family, p=p, alpha=alpha, psi=psi.name, K=psi.nodes, seed=seed))
    pp = conjugate(p).p_prime
    if not power_in_ap(alpha, pp, grid.dim):
        lo, hi = power_ap_range(pp, grid.dim)
        rep.flag(f"alpha={alpha!r} is outside the A_p' range ({lo!r}, {hi!r}); results are not covered by the theorem")
    if not psi.converges(alpha):
        raise HypothesisViolation(f"int t^{alpha} psi(t) dt diverges")
    I = psi.moment(alpha)
    rep.values.update(integral=I, midpoint_integral=psi.midpoint_moment(alpha))
    method = "moments" if p == 2 else "direct"

    def ratio(f: GridFunction, how: str) -> float | None:
        src = bmo_norm(f, w, p, family, method=how)
        if not src > 0:
            return None
        return bmo_norm(hardy_average(f, psi), w, p, family, method=how) / src

    r = ratio(w.function, "direct")
    if r is None:
        rep.flag("the weight is constant, so its own ratio is undefined; the battery carries the check")
    else:
        rep.values["witness_ratio"] = r
        rep.rows.append(inequality("|ratio - I| <= tol*I", abs(r - I), tol * I, 0.0))
    if battery:
        best, label = -math.inf, "none"
        for trial in upsi_battery(w, p, seed):
            rr = ratio(trial.function, method)
            if rr is not None and rr > best:
                best, label = rr, trial.label
        rep.values.update(battery_max=best, battery_witness=label)
        rep.rows.append(inequality("battery max ratio <= I(1+tol)", best, I * (1.0 + tol), 0.0))
    return rep


def zero_escape_box(escape: np.ndarray) -> tuple[slice, ...] | None:
    """Bounding box of the zero-escape cells if every cell inside it also has zero escape."""
    idx = np.nonzero(escape == 0.0)
    if idx[0].size == 0:
        return None
    box = tuple(slice(int(i.min()), int(i.max()) + 1) for i in idx)
    return box if np.all(escape[box] == 0.0) else None


def restrict(f: GridFunction, box: tuple[slice, ...]) -> GridFunction:
    """The grid function on a rectangular block of cells."""
    g = f.grid
    lo, hi, cells = [], [], []
    for ax, s in enumerate(box):
        e = g.edges(ax)
        lo.append(e[s.start])
        hi.append(e[s.stop])
        cells.append(s.stop - s.start)
    return GridFunction(Grid(tuple(lo), tuple(hi), tuple(cells)), f.values[box])


def check_vpsi(
    w: Weight,
    psi: PsiProfile,
    p: float,
    family: CubeFamily = CubeFamily.ALL,
    tol: float = 0.02,
) -> TheoremReport:
    """
    ``||V_psi||_{BMO^p(w)} = int_0^1 t^(-alpha-n) psi(t) dt`` for ``w = |x|^alpha``.

    Both norms are taken on the block of cells whose dilations ``x/t`` never
    leave the grid, so zero extension does not enter.
    """
    family = CubeFamily.parse(family)
    alpha = _require_power(w)
    grid = w.grid
    beta = -alpha - grid.dim
    rep = TheoremReport("vpsi", _hyp(w, family, p=p, alpha=alpha, psi=psi.name, K=psi.nodes))
    if not psi.converges(beta):
        raise HypothesisViolation(
            f"int t^({beta!r}) psi(t) dt diverges; psi must vanish near 0"
        )
    I = psi.moment(beta)
    rep.values.update(integral=I, midpoint_integral=psi.midpoint_moment(beta))
    V = cesaro_average(w.function, psi)
    box = zero_escape_box(V.escape)
    if box is None:
        raise HypothesisViolation("no rectangular block of zero-escape cells; shrink the support of psi")
    wb = Weight(restrict(w.function, box), w.power)
    vb = restrict(V.values, box)
    if family is CubeFamily.DYADIC:
        check_family(wb.grid, family)
    src = bmo_norm(wb.function, wb, p, family)
    if not src > 0:
        raise HypothesisViolation("the weight has zero oscillation on the zero-escape block")
    r = bmo_norm(vb, wb, p, family) / src
    rep.values.update(witness_ratio=r, block=wb.grid.describe())
    rep.rows.append(inequality("|ratio - I| <= tol*I", abs(r - I), tol * I, 0.0))
    return rep


def prop21_constants(q: float, r: float) -> tuple[float, float]:
    """Stated constant ``2 (r/(q-r))^(1/q)`` and the one its argument yields, ``2^(1/r) (r/(q-r))^(1/q)``."""
    base = (r / (q - r)) ** (1.0 / q)
    return 2.0 * base, 2.0 ** (1.0 / r) * base


def check_prop21_embedding(
    f: GridFunction,
    w: Weight,
    p: float,
    q: float,
    r: float,
    family: CubeFamily = CubeFamily.ALL,
) -> TheoremReport:
    """
    ``(int_Q |f|^r w)^(1/r) <= C ||f||_{WM^p_q(w)} w(Q)^(1/r - 1/p)`` for every cube.

    Dividing by ``w(Q)^(1/r-1/p)`` and taking the supremum turns the left side
    into the Morrey norm with exponents ``(p, r)``, so one scan covers every
    cube.  Two rows: the stated constant and the derived one.
    """
    if not 0 < r < q <= p:
        raise DomainError(f"need 0 < r < q <= p, got p={p}, q={q}, r={r}")
    family = CubeFamily.parse(family)
    rep = TheoremReport("prop21", _hyp(w, family, p=p, q=q, r=r))
    lhs = morrey_norm(f, w, p, r, family)
    wm = weak_morrey_norm(f, w, p, q, family)
    stated, derived = prop21_constants(q, r)
    rep.rows += [
        inequality("sup_Q lhs <= 2(r/(q-r))^(1/q) ||f||_WM", lhs, stated * wm),
        inequality("sup_Q lhs <= 2^(1/r)(r/(q-r))^(1/q) ||f||_WM", lhs, derived * wm),
    ]
    rep.values.update(morrey_r=lhs, weak_morrey=wm, stated_constant=stated, derived_constant=derived)
    return rep


def check_thm12_a1_witness(w: Weight, family: CubeFamily = CubeFamily.ALL, pair_limit: int = 64) -> TheoremReport:
    """
    ``sup_{Q1 in Q} avg_Q w / avg_{Q1} w`` against ``[w]_{A_1}``.

    Grids with at most ``pair_limit`` cells scan every nested pair; larger
    grids use single-cell ``Q1``, where the inner minimum is attained.
    """
    family = CubeFamily.parse(family)
    grid = w.grid
    rep = TheoremReport("thm12", _hyp(w, family))
    A, qa = a1_constant(w, family)
    v = w.values
    best = -math.inf
    if grid.size <= pair_limit:
        cubes = list(enumerate_cubes(grid, family))
        avgs = {q: float(np.mean(v[q.slices()])) for q in cubes}
        for q in cubes:
            inner = min(avgs[s] for s in cubes if q.contains(s))
            best = max(best, avgs[q] / inner)
        mode = "pairs"
    else:
        for q in enumerate_cubes(grid, family):
            block = v[q.slices()]
            best = max(best, float(np.mean(block)) / float(block.min()))
        mode = "single cells"
    rep.values.update(a1=A, pair_sup=best, witness=qa.describe(grid), mode=mode)
    rep.rows.append(inequality("|pair sup - [w]_A1| <= 1e-12", abs(best - A), 1e-12 * max(1.0, A), 0.0))
    return rep


def _loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    if lx.size < 2 or np.ptp(lx) == 0:
        return math.nan
    return float(np.polyfit(lx, ly, 1)[0])


def _buckley_cubes(grid: Grid, witness: Cube) -> list[Cube]:
    # the A_p witness plus cubes touching the singularity at the origin
    cubes = [witness]
    n = grid.cells[0]
    mid = n // 2
    s = 1
    while s <= n:
        for a in (mid - s // 2, mid, mid - s):
            c = Cube((a,) * grid.dim, s)
            if 0 <= a and a + s <= n and c not in cubes:
                cubes.append(c)
        s *= 2
    return cubes


BUCKLEY_TOL = 0.15


def buckley_sharpness_scan(
    p: float,
    q: float,
    deltas: Sequence[float],
    grid: Grid | None = None,
    family: CubeFamily = CubeFamily.ALL,
    wm_levels: int = 64,
    tol: float = BUCKLEY_TOL,
) -> TheoremReport:
    """
    Lower bounds for ``||M||`` on ``w = |x|^((p-1)(1-delta))`` as ``delta -> 0``.

    For each delta the row holds ``[w]_{A_p}`` and the best DUAL_POWER ratios
    into L^p, weak L^p, Morrey and weak Morrey.  Slopes of log(bound) against
    log([w]_{A_p}) are compared with ``1/(p-1)`` for L^p and ``1/p`` for the
    Morrey and weak targets.  The weak Morrey bound is evaluated on the best
    Morrey trial with ``wm_levels`` geometric levels, which keeps it a lower
    bound.
    """
    if not p > 1:
        raise DomainError(f"p must be > 1, got {p}")
    if not 1 < q < p:
        raise DomainError(f"need 1 < q < p, got q={q}, p={p}")
    grid = grid or Grid.line(-1.0, 1.0, 4096)
    family = CubeFamily.parse(family)
    rep = TheoremReport("buckley", {"p": p, "q": q, "grid": grid.describe(), "family": family.value})
    src = NormSpec(NormKind.LEBESGUE, p)
    targets = [
        NormSpec(NormKind.LEBESGUE, p),
        NormSpec(NormKind.WEAK_LEBESGUE, p),
        NormSpec(NormKind.MORREY, p, q),
    ]
    sweep = []
    for delta in deltas:
        if not 0 < delta <= 1:
            rep.flag(f"delta={delta!r} is outside (0, 1]; row skipped")
            continue
        a = (p - 1.0) * (1.0 - delta)
        if not power_in_ap(a, p, grid.dim):
            rep.flag(f"exponent {a!r} leaves the A_p range; row skipped")
            continue
        w = Weight.power_law(grid, a)
        A, qa = ap_constant(w, p, family)
        trials = dual_power_trials(w, p, _buckley_cubes(grid, qa))
        lp, wlp, mor = estimate_operator_norms(
            lambda f: maximal(f, family), w, src, targets, trials, family, "M"
        )
        best = next(t for t in trials if t.label == mor.witness)
        mf = maximal(best.function, family)
        vals = np.abs(mf.values)
        vals = vals[vals > 0]
        levels = np.geomspace(vals.min(), vals.max(), wm_levels)
        wm = weak_morrey_norm(mf, w, p, q, family, levels=levels) / lebesgue_norm(best.function, w, p)
        sweep.append({
            "delta": float(delta), "exponent": a, "ap": A,
            "lb_Lp": lp.lower_bound, "lb_wLp": wlp.lower_bound,
            "lb_Morrey": mor.lower_bound, "lb_wMorrey": wm,
            "witness_Lp": lp.witness, "witness_Morrey": mor.witness,
        })
    rep.sweep = sweep
    expected = {"lb_Lp": 1.0 / (p - 1.0), "lb_wLp": 1.0 / p, "lb_Morrey": 1.0 / p, "lb_wMorrey": 1.0 / p}
    if len(sweep) >= 2:
        aps = [row["ap"] for row in sweep]
        for key, target in expected.items():
            slope = _loglog_slope(aps, [row[key] for row in sweep])
            rep.values[f"slope_{key}"] = slope
            rep.rows.append(InequalityRow(
                f"|slope({key}) - {target!r}| <= {tol!r}", abs(slope - target), tol,
                bool(abs(slope - target) <= tol), f"slope={slope!r}",
            ))
    rep.values["tolerance"] = tol
    return rep


def builtin_battery(grid: Grid, seed: int = 42) -> list[tuple[str, Weight]]:
    """Fourteen strictly positive weights: constants, steps, powers and smoothed random."""
    out = [
        ("const:1", Weight.constant(grid, 1.0)),
        ("const:2.5", Weight.constant(grid, 2.5)),
    ]
    lo, hi = grid.lo[0], grid.hi[0]
    for left, right, frac in ((1.0, 4.0, 0.5), (4.0, 1.0, 0.3), (1.0, 20.0, 0.65)):
        x0 = lo + frac * (hi - lo)
        out.append((f"step:{left!r},{right!r}@{x0!r}", Weight.step(grid, left, right, x0)))
    for a in (-0.5, -0.25, 0.25, 0.5, 1.0):
        if grid.contains_origin() or a > 0:
            out.append((f"power:{a!r}", Weight.power_law(grid, a)))
    rng = np.random.default_rng(seed)
    for k, v in enumerate(_smoothed_random(grid, rng, 4)):
        v = v / max(float(np.abs(v).max()), 1e-300)
        out.append((f"random#{k}", Weight(GridFunction(grid, np.exp(1.5 * v)), label=f"random#{k}(seed={seed})")))
    return out
