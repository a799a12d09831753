import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densinv import Grid1D, SpaceTimeField, TimeGrid
from densinv.errors import ContractViolation, DimensionError, InvariantViolation
from densinv.norms import NormConfig, alpha_norm, alpha_norm_values, check_equivalence, space_norm

RING = Grid1D(-1.0, 1.0, 64)
TIMES = TimeGrid(0.0, 1.0, 50)


def _field(values):
    return SpaceTimeField(RING, TIMES, values)


def _random_field(seed):
    rng = np.random.default_rng(seed)
    return _field(rng.normal(size=(51, 64)) * np.exp(rng.normal(size=(51, 1))))


def test_space_norm_examples():
    assert space_norm(np.ones(64), RING, 1) == pytest.approx(2.0, abs=1e-15)
    assert space_norm(np.ones(64), RING, 2) == pytest.approx(np.sqrt(2), abs=1e-15)
    assert abs(space_norm(np.sin(np.pi * RING.x), RING, 2) - 1.0) < 1e-12
    with pytest.raises(ContractViolation):
        space_norm(np.ones(64), RING, 3)


def test_config_validation():
    with pytest.raises(ContractViolation):
        NormConfig(p=3)
    with pytest.raises(ContractViolation):
        NormConfig(alpha=-1)


def test_alpha_zero_is_sup_of_space_norm():
    F = _random_field(0)
    for p in (1, 2):
        expect = max(space_norm(F.values[k], RING, p) for k in range(51))
        assert alpha_norm(F, NormConfig(p, 0.0)) == pytest.approx(expect, rel=1e-14)


def test_constant_in_time_attains_at_t0():
    g = np.cos(np.pi * RING.x) + 2
    F = _field(np.tile(g, (51, 1)))
    assert alpha_norm(F, NormConfig(2, 3.0)) == pytest.approx(space_norm(g, RING, 2), rel=1e-14)


@pytest.mark.parametrize("p", [1, 2])
def test_exponential_growth_closed_form(p):
    beta, alpha = 4.0, 2.0   # beta > alpha / p
    g = np.sin(np.pi * RING.x) + 0.3
    F = _field(np.exp(beta * TIMES.t)[:, None] * g)
    expect = np.exp((beta - alpha / p) * 1.0) * space_norm(g, RING, p)
    assert alpha_norm(F, NormConfig(p, alpha)) == pytest.approx(expect, rel=1e-12)


def test_empty_time_axis():
    with pytest.raises(DimensionError):
        alpha_norm_values(np.zeros((0, 64)), np.zeros(0), RING, 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000), st.floats(0, 50), st.sampled_from([1, 2]),
       st.one_of(st.just(0.0), st.floats(1e-6, 1e3), st.floats(-1e3, -1e-6)))
def test_norm_axioms(s1, s2, alpha, p, c):
    F, G = _random_field(s1), _random_field(s2)
    cfg = NormConfig(p, alpha)
    nF, nG = alpha_norm(F, cfg), alpha_norm(G, cfg)
    assert alpha_norm(F + G, cfg) <= (nF + nG) * (1 + 1e-12)
    assert alpha_norm(F.with_values(c * F.values), cfg) == pytest.approx(abs(c) * nF, rel=1e-12)
    assert nF > 0
    assert alpha_norm(F.with_values(np.zeros((51, 64))), cfg) == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 20), st.floats(0, 20), st.sampled_from([1, 2]))
def test_monotone_in_alpha(seed, a1, a2, p):
    a1, a2 = sorted((a1, a2))
    F = _random_field(seed)
    assert alpha_norm(F, NormConfig(p, a2)) <= alpha_norm(F, NormConfig(p, a1))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 200), st.sampled_from([1, 2]))
def test_sandwich_property(seed, alpha, p):
    b = check_equivalence(_random_field(seed), NormConfig(p, alpha))
    assert b.lower <= b.middle <= b.upper


def test_sandwich_examples():
    F = _random_field(7)
    b = check_equivalence(F, NormConfig(2, 5.0))
    assert b.lower <= b.middle <= b.upper
    b0 = check_equivalence(F, NormConfig(1, 0.0))
    assert b0.lower == b0.middle == b0.upper
    z = check_equivalence(_field(np.zeros((51, 64))), NormConfig(2, 5.0))
    assert z.lower == z.middle == z.upper == 0


def test_sandwich_violation_reports_values():
    F = _random_field(8)
    # a window ending before the samples do makes the lower bound too large
    with pytest.raises(InvariantViolation, match="lower=.*upper="):
        check_equivalence(F, NormConfig(1, 10.0, t0=0.0, t_final=-5.0))
