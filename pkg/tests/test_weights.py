import math

import numpy as np
import pytest

from weightlab import (
    CubeFamily,
    DegenerateWeightError,
    DomainError,
    Grid,
    Weight,
    a1_constant,
    ainfty_constant,
    ap_constant,
    conjugate,
    dual_weight,
    weighted_measure,
)
from weightlab.experiments import builtin_battery
from weightlab.grid import Cube
from weightlab.weights import (
    a1_functional,
    ainfty_functional,
    ap_functional,
    power_ap_range,
    power_cell_averages_1d,
    power_in_ap,
)


def test_weighted_measure_examples():
    g = Grid.line(0.0, 1.0, 8)
    one = Weight.constant(g)
    assert weighted_measure(one, g.whole()) == 1.0
    assert weighted_measure(one, Cube((0,), 4)) == 0.5
    assert weighted_measure(Weight.power_law(g, 0.5), g.whole()) == pytest.approx(2 / 3, abs=1e-15)


def test_power_cell_averages_are_exact():
    e = np.array([-1.0, -0.25, 0.5, 2.0])
    got = power_cell_averages_1d(e, 0.5)
    F = lambda x: math.copysign(abs(x) ** 1.5 / 1.5, x)
    want = [(F(b) - F(a)) / (b - a) for a, b in zip(e[:-1], e[1:])]
    assert np.allclose(got, want, rtol=1e-14)
    with pytest.raises(DomainError):
        power_cell_averages_1d(e, -1.0)


def test_power_2d_total_mass():
    g = Grid.square(-1.0, 1.0, 8)
    w = Weight.power_law(g, -0.5)
    # int over [-1,1]^2 of |x|^-1/2 by polar integration of the square
    from scipy import integrate as quad

    exact = 8 * quad.quad(lambda t: (1 / math.cos(t)) ** 1.5 / 1.5, 0, math.pi / 4)[0]
    assert np.sum(w.values) * g.cell_volume == pytest.approx(exact, rel=1e-8)


def test_dual_weight_examples():
    g = Grid.line(0.0, 2.0, 2)
    assert np.array_equal(dual_weight(Weight.constant(g), 2).values, [1.0, 1.0])
    assert np.array_equal(dual_weight(Weight.from_values(g, [1.0, 4.0]), 2).values, [1.0, 0.25])
    zero = Weight.from_values(g, [0.0, 1.0])
    assert dual_weight(zero, 2, eps=0.5).values[0] == 2.0
    with pytest.raises(DegenerateWeightError):
        dual_weight(zero, 2)


def test_ap_examples():
    g = Grid.line(0.0, 2.0, 256)
    assert ap_constant(Weight.constant(g), 2)[0] == 1.0
    val, q = ap_constant(Weight.step(g, 1.0, 4.0, 1.0), 2)
    assert val == pytest.approx(25 / 16, rel=0.005)
    lo, hi = q.bounds(g)[0]
    assert lo < 1.0 < hi and 1.0 - lo == pytest.approx(hi - 1.0)


def test_ap_power_regression():
    g = Grid.line(-1.0, 1.0, 512)
    val, q = ap_constant(Weight.power_law(g, 0.5), 2)
    assert val == pytest.approx(1.4622064792447664, rel=1e-12)
    assert q == Cube((236,), 276)


def test_a1_examples():
    g = Grid.line(0.0, 2.0, 8)
    assert a1_constant(Weight.constant(g, 3.0))[0] == 1.0
    val, q = a1_constant(Weight.from_values(g, [1, 1, 1, 1, 2, 2, 2, 2]))
    assert val == 1.8 and q == Cube((3,), 5)
    assert a1_constant(Weight.from_values(Grid.line(0, 2, 2), [1.0, 4.0]))[0] == 2.5


def test_ainfty_examples():
    g = Grid.line(0.0, 2.0, 1024)
    assert ainfty_constant(Weight.constant(g))[0] == 1.0
    t = 4 / 3 - 1 / math.log(4)
    exact = (4 - 3 * t) * 4 ** (t - 1)
    assert ainfty_constant(Weight.step(g, 1.0, 4.0, 1.0))[0] == pytest.approx(exact, rel=1e-4)


def test_conjugate_examples():
    assert conjugate(2).p_prime == 2
    assert math.isinf(conjugate(1).p_prime)
    assert conjugate(4).p_prime == pytest.approx(4 / 3)
    assert conjugate(math.inf).p_prime == 1
    for p in (1.2, 3.0, 7.5):
        c = conjugate(p)
        assert 1 / c.p + 1 / c.p_prime == pytest.approx(1, abs=1e-12)
    with pytest.raises(DomainError):
        conjugate(0.5)


def test_zero_cells_are_errors():
    w = Weight.from_values(Grid.line(0, 1, 3), [1.0, 0.0, 2.0])
    for fn in (lambda: ap_constant(w, 2), lambda: a1_constant(w), lambda: ainfty_constant(w)):
        with pytest.raises(DegenerateWeightError):
            fn()


@pytest.fixture(scope="module")
def battery():
    return builtin_battery(Grid.line(-1.0, 1.0, 64), seed=7)


def test_constant_invariants(battery):
    for name, w in battery:
        a1 = a1_constant(w)[0]
        ai = ainfty_constant(w)[0]
        prev = math.inf
        for p in (1.5, 2.0, 3.0, 6.0):
            ap = ap_constant(w, p)[0]
            assert ap >= 1 - 1e-12, name
            assert ap <= prev + 1e-9, name
            assert ap <= a1 + 1e-9, name
            assert ai <= ap + 1e-9, name
            prev = ap


def test_scale_invariance(battery):
    for name, w in battery:
        for p in (1.5, 3.0):
            base = ap_constant(w, p)
            assert ap_constant(w.scaled(4.0), p) == base
            assert ap_constant(w.scaled(3.7), p)[0] == pytest.approx(base[0], rel=1e-12)


def test_witness_reproduces_value(battery):
    for fam in (CubeFamily.ALL, CubeFamily.DYADIC):
        for name, w in battery:
            val, q = ap_constant(w, 2.5, fam)
            assert ap_functional(w, 2.5, q) == val
            val, q = a1_constant(w, fam)
            assert a1_functional(w, q) == val
            val, q = ainfty_constant(w, fam)
            assert ainfty_functional(w, q) == val


@pytest.mark.parametrize("a", [-0.5, 0.5, 1.5])
def test_refinement_never_decreases(a):
    prev = None
    for n in (16, 32, 64, 128):
        w = Weight.power_law(Grid.line(-1.0, 1.0, n), a)
        cur = (ap_constant(w, 2)[0], a1_constant(w)[0], ainfty_constant(w)[0])
        if prev is not None:
            assert all(c >= p - 1e-12 for c, p in zip(cur, prev))
        prev = cur


def test_power_ap_range():
    assert power_ap_range(2, 1) == (-1.0, 1.0)
    assert power_in_ap(0.5, 2) and not power_in_ap(1.0, 2)
    assert power_in_ap(0.0, 1) and not power_in_ap(0.1, 1)
    assert power_ap_range(3, 2) == (-2.0, 4.0)
