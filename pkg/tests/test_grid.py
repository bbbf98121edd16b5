import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weightlab import (
    ConfigurationError,
    Cube,
    CubeFamily,
    Grid,
    GridFunction,
    GridRangeError,
    ParseError,
    average,
    enumerate_cubes,
    integrate,
    read_grid,
    write_grid,
)
from weightlab.grid import count_cubes, cube_sum, parse_grid_text, scan_max, sup_over_cubes, thread_count


@pytest.fixture
def unit8():
    return Grid.line(0.0, 1.0, 8)


@pytest.fixture
def ramp4():
    return GridFunction(Grid.line(0.0, 1.0, 4), [1, 2, 3, 4])


def test_integrate_examples(unit8, ramp4):
    one = GridFunction.constant(unit8, 1.0)
    assert integrate(one, unit8.whole()) == 1.0
    assert integrate(one, Cube((3,), 1)) == 0.125
    assert integrate(ramp4, Cube((1,), 2)) == 1.25


def test_average_examples(unit8, ramp4):
    c = GridFunction.constant(unit8, 2.75)
    for q in enumerate_cubes(unit8):
        assert average(c, q) == 2.75
    assert average(ramp4, Cube((1,), 2)) == 2.5
    ind = np.zeros(8)
    ind[2:4] = 1.0
    assert average(GridFunction(unit8, ind), Cube((0,), 8)) == 2 / 8


def test_enumeration_counts():
    assert len(list(enumerate_cubes(Grid.line(0, 1, 4)))) == 10
    assert len(list(enumerate_cubes(Grid.line(0, 1, 4), CubeFamily.DYADIC))) == 7
    assert len(list(enumerate_cubes(Grid.square(0, 1, 2)))) == 5
    for n in range(1, 9):
        assert count_cubes(Grid.line(0, 1, n)) == n * (n + 1) // 2
        assert count_cubes(Grid.square(0, 1, n)) == sum((n - s + 1) ** 2 for s in range(1, n + 1))


def test_enumeration_order_and_dyadic_anchors():
    cubes = list(enumerate_cubes(Grid.square(0, 1, 4), CubeFamily.DYADIC))
    sides = [q.side for q in cubes]
    assert sides == sorted(sides)
    assert all(a % q.side == 0 for q in cubes for a in q.anchor)
    assert cubes[:4] == [Cube((0, 0), 1), Cube((0, 1), 1), Cube((0, 2), 1), Cube((0, 3), 1)]


def test_dyadic_needs_power_of_two():
    with pytest.raises(ConfigurationError):
        list(enumerate_cubes(Grid.line(0, 1, 6), CubeFamily.DYADIC))


def test_sup_over_cubes_examples(unit8, ramp4):
    val, q = sup_over_cubes(unit8, CubeFamily.ALL, lambda c: unit8.cube_volume(c.side))
    assert (val, q) == (1.0, unit8.whole())
    val, q = sup_over_cubes(unit8, CubeFamily.ALL, lambda c: 3.0)
    assert (val, q) == (3.0, Cube((0,), 1))
    val, q = sup_over_cubes(ramp4.grid, CubeFamily.ALL, lambda c: average(ramp4, c))
    assert (val, q) == (4.0, Cube((3,), 1))


def test_sup_over_cubes_parallel_matches_sequential():
    g = Grid.square(0, 1, 12)
    f = GridFunction(g, np.random.default_rng(3).integers(0, 5, g.shape))

    def fn(c):
        return average(f, c)

    assert sup_over_cubes(g, CubeFamily.ALL, fn, threads=1) == sup_over_cubes(g, CubeFamily.ALL, fn, threads=8)


def test_scan_max_matches_sequential_scan():
    g = Grid.line(0, 1, 13)
    v = np.random.default_rng(0).integers(0, 4, 13).astype(float)
    fast = scan_max(g, CubeFamily.ALL, [v], lambda s, S: S[0] / s)
    slow = sup_over_cubes(g, CubeFamily.ALL, lambda c: cube_sum(v, c) / c.side, threads=1)
    assert fast == slow


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=24),
    st.data(),
)
def test_integrate_is_additive_and_average_bounded(vals, data):
    g = Grid.line(0.0, 3.0, len(vals))
    f = GridFunction(g, vals)
    split = data.draw(st.integers(1, len(vals) - 1))
    whole = integrate(f, Cube((0,), len(vals)))
    parts = integrate(f, Cube((0,), split)) + integrate(f, Cube((split,), len(vals) - split))
    assert parts == pytest.approx(whole, rel=1e-12, abs=1e-9)
    q = Cube((0,), split)
    assert min(vals[:split]) - 1e-9 <= average(f, q) <= max(vals[:split]) + 1e-9


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        Grid.line(1.0, 0.0, 4)
    with pytest.raises(ConfigurationError):
        Grid.line(0.0, 1.0, 0)
    with pytest.raises(ConfigurationError):
        GridFunction(Grid.line(0, 1, 3), [1.0, 2.0])
    with pytest.raises(ConfigurationError):
        GridFunction(Grid.line(0, 1, 2), [1.0, np.nan])
    with pytest.raises(GridRangeError):
        integrate(GridFunction.constant(Grid.line(0, 1, 4), 1.0), Cube((3,), 2))


def test_grid_function_is_read_only():
    f = GridFunction(Grid.line(0, 1, 2), [1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0] = 5.0


def test_grid_file_round_trip(tmp_path):
    g = Grid((-1.0, 0.0), (1.0, 2.0), (3, 2))
    f = GridFunction(g, np.arange(6) / 7.0)
    path = tmp_path / "f.grid"
    write_grid(f, path)
    back = read_grid(path)
    assert back.grid == g
    assert np.array_equal(back.values, f.values)


def test_grid_file_rejects_bad_input():
    with pytest.raises(ParseError):
        parse_grid_text("weightlab-grid v2\n1\n0 1 2\n1 2\n")
    with pytest.raises(ParseError):
        parse_grid_text("weightlab-grid v1\n1\n0 1 3\n1 2\n")
    with pytest.raises(ParseError):
        parse_grid_text("weightlab-grid v1\n1\n0 1 2\n1 x\n")


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("WEIGHTLAB_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("WEIGHTLAB_THREADS", "0")
    assert thread_count() >= 1
