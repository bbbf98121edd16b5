"""Fast scans against exhaustive references on small grids, compared bit for bit."""

import numpy as np
import pytest

import oracles
from weightlab import (
    CubeFamily,
    Grid,
    GridFunction,
    Weight,
    a1_constant,
    ap_constant,
    bmo_inf_norm,
    evaluate_norm,
    lebesgue_norm,
    maximal,
    weak_lebesgue_norm,
    NormSpec,
)

SHAPES_1D = list(range(1, 17))
SHAPES_2D = [(n0, n1) for n0 in range(1, 5) for n1 in range(1, 5)]


def random_case(seed):
    """Grid, function and positive weight for one seeded case; a third of them have ties."""
    rng = np.random.default_rng(seed)
    if seed % 2 == 0:
        cells = (SHAPES_1D[seed // 2 % len(SHAPES_1D)],)
        grid = Grid((-1.0,), (1.5,), cells)
    else:
        cells = SHAPES_2D[seed // 2 % len(SHAPES_2D)]
        grid = Grid((-1.0, 0.0), (1.0, 3.0), cells)
    if seed % 3 == 0:
        f = rng.integers(-3, 4, size=grid.shape).astype(float)
        w = rng.integers(1, 4, size=grid.shape).astype(float)
    else:
        f = rng.standard_normal(grid.shape) * rng.uniform(0.1, 10)
        w = np.exp(rng.standard_normal(grid.shape))
    return grid, f, w


def families(grid):
    out = [CubeFamily.ALL]
    if all(n & (n - 1) == 0 for n in grid.cells):
        out.append(CubeFamily.DYADIC)
    return out


SEEDS = range(100)


def same(a, b):
    return np.array_equal(np.asarray(a), np.asarray(b))


@pytest.mark.parametrize("seed", SEEDS)
def test_constants_bitwise(seed):
    grid, _, w = random_case(seed)
    weight = Weight.from_values(grid, w)
    for fam in families(grid):
        for p in (1.5, 2.0, 3.0):
            assert ap_constant(weight, p, fam) == oracles.argmax_cubes(grid, fam, oracles.ap(w, p, fam))
        assert a1_constant(weight, fam) == oracles.argmax_cubes(grid, fam, oracles.a1(w, fam))


@pytest.mark.parametrize("seed", SEEDS)
def test_maximal_bitwise(seed):
    grid, f, _ = random_case(seed)
    for fam in families(grid):
        fast = maximal(GridFunction(grid, f), fam).values
        assert same(fast, oracles.maximal(grid, fam, f))


@pytest.mark.parametrize("seed", SEEDS)
def test_norms_bitwise(seed):
    grid, f, w = random_case(seed)
    fn, weight, vol = GridFunction(grid, f), Weight.from_values(grid, w), grid.cell_volume
    for p in (1.0, 2.0, 3.5):
        assert lebesgue_norm(fn, weight, p) == oracles.lebesgue(f, w, p, vol)
        assert weak_lebesgue_norm(fn, weight, p) == oracles.weak_lebesgue(f, w, p, vol)
    for fam in families(grid):
        for p, q in ((4.0, 2.0), (2.0, 1.0), (3.0, 3.0)):
            got = evaluate_norm(fn, weight, NormSpec.parse(f"Morrey:{p},{q}"), fam)
            assert got == oracles.argmax_cubes(grid, fam, oracles.morrey(f, w, p, q, vol))
            got = evaluate_norm(fn, weight, NormSpec.parse(f"wMorrey:{p},{q}"), fam)
            assert got == oracles.argmax_cubes(grid, fam, oracles.weak_morrey(f, w, p, q, vol))
        for p in (1.0, 2.0, 3.0):
            got = evaluate_norm(fn, weight, NormSpec.parse(f"BMO:{p}"), fam)
            assert got == oracles.argmax_cubes(grid, fam, oracles.bmo(f, w, p, vol))
        got = evaluate_norm(fn, weight, NormSpec.parse("BMOinf"), fam)
        assert got == oracles.argmax_cubes(grid, fam, oracles.bmo_inf(f, w))
        assert bmo_inf_norm(fn, weight, fam) == got[0]
