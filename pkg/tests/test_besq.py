import numpy as np
import pytest

from radial_dunkl.besq import besq_terminal_samples, simulate_besq_exact
from radial_dunkl.stats import ks_two_sample, mc_moment_check


def test_preconditions():
    with pytest.raises(ValueError):
        simulate_besq_exact(0.0, 1.0, [0, 1])
    with pytest.raises(ValueError):
        simulate_besq_exact(1.0, -1.0, [0, 1])
    with pytest.raises(ValueError):
        simulate_besq_exact(1.0, 1.0, [0, 1, 1])


def test_deterministic_and_nonnegative():
    grid = np.linspace(0, 1, 1001)
    a = simulate_besq_exact(0.6, 0.0, grid, 3, 2)
    b = simulate_besq_exact(0.6, 0.0, grid, 3, 2)
    assert np.array_equal(a.states, b.states)
    assert a.states.min() >= 0 and a.states[0] == 0.0


@pytest.mark.parametrize("delta,y0,t", [(1.6, 1.0, 1.0), (0.5, 2.0, 0.3), (3.0, 0.0, 2.0)])
def test_mean_identity(delta, y0, t):
    draws = besq_terminal_samples(delta, y0, t, 1024, seed=12)
    assert mc_moment_check(draws, y0 + delta * t).passed


def test_mean_identity_along_path():
    grid = np.linspace(0, 1, 201)
    ends = np.array([simulate_besq_exact(1.6, 1.0, grid, 8, i).states[-1] for i in range(1024)])
    assert mc_moment_check(ends, 2.6).passed


def test_from_zero_is_scaled_chi_square():
    t = 0.7
    y = besq_terminal_samples(1.6, 0.0, t, 512, seed=4) / t
    direct = np.random.default_rng(99).chisquare(1.6, 512)
    assert ks_two_sample(y, direct).passed


def test_dimension_two_stays_positive():
    grid = np.linspace(0, 1, 10_001)
    low = sum(simulate_besq_exact(2.5, 1.0, grid, 1, i).states.min() < 1e-6 for i in range(400))
    assert low / 400 < 0.005


def test_small_dimension_hits_zero():
    grid = np.linspace(0, 1, 10_001)
    hit = sum(simulate_besq_exact(0.4, 0.2, grid, 1, i).states.min() < 1e-6 for i in range(50))
    assert hit > 40
