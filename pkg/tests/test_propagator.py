import numpy as np
import pytest

from densinv import Grid1D, SpaceTimeField, TimeGrid, quadrature
from densinv.errors import DimensionError, DomainError
from densinv.observables import current, density
from densinv.propagator import (
    InitialState,
    bump_profile,
    make_driving_potential,
    make_initial_bump,
    make_plane_wave,
    propagate,
)

RING = Grid1D(-1.0, 1.0, 64)


def _zero(grid, times):
    return SpaceTimeField(grid, times, np.zeros((times.n_steps + 1, grid.n_points)))


def test_bump_profile_values():
    assert bump_profile(np.array([0.0]))[0] == pytest.approx(np.exp(-1) + 1, abs=1e-12)
    assert bump_profile(np.array([0.0]))[0] == pytest.approx(1.367879, abs=1e-6)
    np.testing.assert_array_equal(bump_profile(np.array([-1.0, 1.0, 1.5])), 1.0)


def test_initial_bump_is_normalized_real_and_even():
    st = make_initial_bump(RING)
    assert quadrature(st.density, RING) == pytest.approx(1.0, abs=1e-12)
    assert np.all(st.psi0.imag == 0)
    # x_j and x_{N-j} are mirror images on the ring
    np.testing.assert_allclose(st.density[1:], st.density[1:][::-1], atol=1e-15)


def test_presets_reject_other_intervals():
    g = Grid1D(0.0, 2.0, 32)
    with pytest.raises(DomainError):
        make_initial_bump(g)
    with pytest.raises(DomainError):
        make_driving_potential(g, TimeGrid(0, 1, 4))
    with pytest.raises(DomainError):
        make_plane_wave(RING, 1.0)


def test_driving_potential_values():
    g = Grid1D(-1.0, 1.0, 8)   # contains x = 0.5
    tg = TimeGrid(0.0, np.pi / 20, 4)
    v = make_driving_potential(g, tg)
    assert v.values[-1, list(g.x).index(0.5)] == pytest.approx(1.0, abs=1e-12)
    assert np.all(v.values[0] == 0)
    assert np.abs(v.values[:, 0]).max() < 1e-15


def test_initial_state_validation():
    with pytest.raises(DomainError):
        InitialState(RING, np.zeros(64))
    with pytest.raises(DomainError):
        InitialState(RING, np.full(64, np.nan))
    with pytest.raises(DimensionError):
        InitialState(RING, np.ones(10))


def test_plane_wave_phase_and_density():
    times = TimeGrid(0.0, 0.5, 400)
    st = make_plane_wave(RING, np.pi)
    psi = propagate(st, _zero(RING, times))
    np.testing.assert_allclose(density(psi).values, 0.5, atol=1e-12)
    # discrete dispersion: kinetic energy of the mode on the three-point stencil
    e_disc = 2.0 * np.sin(np.pi * RING.dx / 2) ** 2 / RING.dx**2
    phase = np.angle(psi.values[:, 0] / st.psi0[0])
    t = times.t
    cn = -2 * np.arctan(0.5 * times.dt * e_disc) / times.dt   # exact CN phase rate
    np.testing.assert_allclose(np.exp(1j * phase), np.exp(1j * cn * t), atol=1e-12)
    # and within O(dx^2 + dt^2) of the continuum rate pi^2 / 2
    err = np.abs(np.exp(1j * phase) - np.exp(-1j * np.pi**2 * t / 2)).max()
    assert err < 0.5 * (np.pi**2 * RING.dx**2 / 12 * np.pi**2 / 2 + (np.pi**2 / 2) ** 3 * times.dt**2 / 12)


def test_unitarity_on_driven_run():
    times = TimeGrid(0.0, 0.5, 500)
    psi = propagate(make_initial_bump(RING), make_driving_potential(RING, times))
    assert np.abs(quadrature(density(psi).values, RING) - 1).max() <= 1e-10


def test_gauge_covariance():
    times = TimeGrid(0.0, 0.5, 500)
    st = make_initial_bump(RING)
    v = make_driving_potential(RING, times)
    c = 7.0 * np.cos(13 * times.t)[:, None] + 3.0
    n0 = density(propagate(st, v)).values
    n1 = density(propagate(st, v.with_values(v.values + c))).values
    assert np.abs(n1 - n0).max() <= 1e-12
    # constant potential versus zero potential
    nc = density(propagate(st, _zero(RING, times).with_values(np.full((501, 64), 2.5)))).values
    nz = density(propagate(st, _zero(RING, times))).values
    assert np.abs(nc - nz).max() <= 1e-12


def test_time_reversal():
    times = TimeGrid(0.0, 0.5, 500)
    st = make_initial_bump(RING)
    v = make_driving_potential(RING, times)
    psi_T = propagate(st, v).values[-1]
    # H is real, so conj(CN step) is the inverse step; replay the potential backwards
    back = propagate(InitialState(RING, np.conj(psi_T)), v.with_values(v.values[::-1]))
    assert np.abs(np.conj(back.values[-1]) - st.psi0).max() <= 1e-8


def test_second_order_in_time():
    # N = 64 keeps the fastest mode resolved (omega_max * dt ~ 0.13) so the ratio is asymptotic
    st = make_initial_bump(RING)

    def final(ns):
        tg = TimeGrid(0.0, 0.5, ns)
        return propagate(st, make_driving_potential(RING, tg)).values[-1]

    ref = final(64000)
    ratio = np.abs(final(8000) - ref).max() / np.abs(final(16000) - ref).max()
    assert 3.5 <= ratio <= 4.5


def test_keep_every_matches_full_run():
    times = TimeGrid(0.0, 0.1, 100)
    st = make_initial_bump(RING)
    v = make_driving_potential(RING, times)
    full = propagate(st, v)
    sparse = propagate(st, v, keep_every=10)
    assert sparse.times.n_steps == 10
    np.testing.assert_array_equal(sparse.values, full.values[::10])
    with pytest.raises(DimensionError):
        propagate(st, v, keep_every=7)


def test_errors():
    times = TimeGrid(0.0, 0.1, 10)
    st = make_initial_bump(RING)
    bad = _zero(RING, times).with_values(np.full((11, 64), np.inf))
    with pytest.raises(DomainError):
        propagate(st, bad)
    with pytest.raises(DimensionError):
        propagate(st, _zero(Grid1D(-1, 1, 32), times))
    with pytest.raises(DimensionError):
        propagate(st, _zero(RING, times), TimeGrid(0.0, 0.2, 10))


def test_real_state_has_zero_initial_current():
    times = TimeGrid(0.0, 0.1, 10)
    psi = propagate(make_initial_bump(RING), make_driving_potential(RING, times))
    assert np.abs(current(psi).values[0]).max() == 0.0
