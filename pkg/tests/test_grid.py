import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densinv.errors import DimensionError
from densinv.grid import (
    Grid1D,
    SpaceTimeField,
    TimeGrid,
    cumulative_integral,
    d2dt2,
    first_time_derivative,
    quadrature,
    second_time_derivative,
    spatial_derivative,
)

RING = Grid1D(-1.0, 1.0, 64)


def test_grid_geometry():
    g = Grid1D(-1, 1, 10)
    assert g.dx * g.n_points == pytest.approx(2.0, abs=1e-15)
    assert g.x[0] == -1.0 and g.x[-1] == pytest.approx(0.8)
    assert 1.0 not in g.x


@pytest.mark.parametrize("args", [(1, -1, 16), (0, 1, 7), (0, 1, 8.5)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(DimensionError):
        Grid1D(*args)


def test_time_grid():
    tg = TimeGrid(0, 0.5, 1000)
    assert tg.dt == 5e-4
    assert tg.t[-1] == 0.5 and tg.t.size == 1001
    with pytest.raises(DimensionError):
        TimeGrid(0, 1, 1)
    with pytest.raises(DimensionError):
        tg.coarsened(3)


def test_field_shape_and_immutability():
    tg = TimeGrid(0, 1, 4)
    F = SpaceTimeField(RING, tg, np.zeros((5, 64)))
    with pytest.raises(ValueError):
        F.values[0, 0] = 1.0
    with pytest.raises(DimensionError):
        SpaceTimeField(RING, tg, np.zeros((4, 64)))
    with pytest.raises(DimensionError):
        SpaceTimeField(RING, tg, np.zeros((5, 64), dtype=complex))


def test_quadrature_examples():
    x = RING.x
    assert quadrature(np.ones(64), RING) == pytest.approx(2.0, abs=1e-15)
    assert abs(quadrature(np.sin(np.pi * x) ** 2, RING) - 1.0) < 1e-12
    assert abs(quadrature(np.sin(np.pi * x), RING)) < 1e-12
    with pytest.raises(DimensionError):
        quadrature(np.ones(63), RING)


def test_cumulative_integral_examples():
    x = RING.x
    np.testing.assert_allclose(cumulative_integral(np.ones(64), RING), x + 1.0, atol=1e-14)
    assert np.all(cumulative_integral(np.zeros(64), RING) == 0)
    errs = []
    for n in (32, 64, 128):
        g = Grid1D(-1, 1, n)
        errs.append(np.abs(cumulative_integral(np.cos(np.pi * g.x), g) - np.sin(np.pi * g.x) / np.pi).max())
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_cumulative_integral_wraps_to_quadrature():
    rng = np.random.default_rng(0)
    f = rng.normal(size=64)
    g = cumulative_integral(f, RING)
    full = g[-1] + 0.5 * RING.dx * (f[-1] + f[0])
    assert full == pytest.approx(quadrature(f, RING), abs=1e-13)


def test_spatial_derivative_examples():
    x = RING.x
    assert np.all(spatial_derivative(np.full(64, 3.7), RING) == 0)
    err = np.abs(spatial_derivative(np.sin(np.pi * x), RING) - np.pi * np.cos(np.pi * x)).max()
    assert err < (np.pi * RING.dx) ** 2
    z = np.exp(1j * np.pi * x)
    assert np.abs(spatial_derivative(z, RING) - 1j * np.pi * z).max() < (np.pi * RING.dx) ** 2


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_spatial_derivative_order(k):
    errs = []
    for n in (32, 64, 128, 256):
        g = Grid1D(-1, 1, n)
        errs.append(np.abs(spatial_derivative(np.sin(k * np.pi * g.x), g) - k * np.pi * np.cos(k * np.pi * g.x)).max())
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert orders.min() >= 1.9


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=8, max_size=64))
def test_discrete_divergence_theorem(values):
    g = Grid1D(0.0, 3.0, len(values))
    f = np.array(values)
    assert abs(quadrature(spatial_derivative(f, g), g)) <= 1e-12 * max(1.0, np.abs(f).max())


def test_second_time_derivative_examples():
    tg = TimeGrid(0, 1, 20)
    t = tg.t[:, None]
    F = SpaceTimeField(RING, tg, np.broadcast_to(t**2, (21, 64)))
    np.testing.assert_allclose(second_time_derivative(F).values, 2.0, atol=1e-8)
    assert np.all(d2dt2(np.ones((21, 64)), tg.dt) == 0)

    errs = []
    for ns in (50, 100, 200):
        tg = TimeGrid(0, 0.5, ns)
        vals = np.outer(np.sin(10 * tg.t), np.sin(np.pi * RING.x) ** 2)
        exact = -100 * vals
        errs.append(np.abs(d2dt2(vals, tg.dt) - exact).max())
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.1)
    with pytest.raises(DimensionError):
        d2dt2(np.ones((4, 8)), 0.1)


def test_first_time_derivative_exact_for_quadratics():
    t = np.linspace(0, 1, 11)
    np.testing.assert_allclose(first_time_derivative(3 * t**2 - t, 0.1), 6 * t - 1, atol=1e-12)
