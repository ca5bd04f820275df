import numpy as np
import pytest

from radial_dunkl.algebra import AlgebraContext, MultiplicityFunction, alternating_poly_sq, time_change_density
from radial_dunkl.besq import besq_terminal_samples
from radial_dunkl.roots import build_root_system
from radial_dunkl.sde import PathRecord, SimulationConfig, simulate_ensemble, simulate_radial_dunkl
from radial_dunkl.stats import ks_two_sample
from radial_dunkl.timechange import (
    TimeChange,
    TimeChangeError,
    compute_time_change,
    density_along,
    invert_time_change,
    time_changed_V,
)


def setup(family, size, k, **kw):
    s = build_root_system(family, size)
    m = MultiplicityFunction.uniform(s, k)
    return SimulationConfig(system=s, multiplicity=m, **kw), AlgebraContext(s, m)


def test_density_along_matches_pointwise():
    cfg, ctx = setup("B", 3, 0.3, T=0.05, dt=1e-3)
    p = simulate_radial_dunkl(cfg, 0)
    vec = density_along(p.states, ctx)
    assert np.allclose(vec, [time_change_density(ctx, x) for x in p.states], rtol=1e-12)


def test_rank1_clock_is_2t():
    cfg, ctx = setup("A", 2, 0.3, T=1.0, dt=1e-3)
    tc = compute_time_change(simulate_radial_dunkl(cfg, 0), ctx)
    assert tc.values[0] == 0.0
    assert np.allclose(tc.values, 2 * tc.times, rtol=1e-12, atol=1e-12)
    assert invert_time_change(tc, 0.0) == 0.0
    assert np.isclose(invert_time_change(tc, 1.3), 0.65, atol=1e-12)
    assert np.allclose(invert_time_change(tc, np.array([0.2, 1.0])), [0.1, 0.5])


def test_round_trip_and_inverse_accuracy():
    cfg, ctx = setup("A", 3, 0.3, T=0.2, dt=1e-4, seed=2)
    tc = compute_time_change(simulate_radial_dunkl(cfg, 1), ctx)
    assert tc.strictly_increasing
    t_back = invert_time_change(tc, tc.values)
    assert np.abs(t_back - tc.times).max() <= 1e-10 * cfg.T
    targets = np.linspace(0, tc.total, 77)
    t = invert_time_change(tc, targets)
    assert np.abs(np.interp(t, tc.times, tc.values) - targets).max() <= 1e-10 * tc.total


def test_inverse_errors():
    tc = TimeChange(values=np.array([0.0, 1.0, 1.0, 2.0]), dt=0.1)
    with pytest.raises(TimeChangeError):
        invert_time_change(tc, 2.5)
    with pytest.raises(TimeChangeError):
        invert_time_change(tc, -0.1)
    stalled = TimeChange(values=np.array([0.0, 0.0, 1.0]), dt=0.1)
    with pytest.raises(TimeChangeError):
        invert_time_change(stalled, 0.0)


def test_time_changed_v_starts_at_v_x0():
    cfg, ctx = setup("A", 3, 0.3, T=0.05, dt=1e-5, seed=1)
    p = simulate_radial_dunkl(cfg, 0)
    tc = compute_time_change(p, ctx)
    y = time_changed_V(p, ctx, tc, np.linspace(0, min(0.5, tc.total), 11))
    assert y.states[0] == pytest.approx(alternating_poly_sq(ctx, cfg.x0), rel=1e-12)
    assert np.all(y.states >= 0)


def test_rank1_time_changed_v_is_besq():
    k = 0.3
    cfg, ctx = setup("A", 2, k, T=0.5, dt=1e-3, path_count=256, seed=3)
    ends = []
    for p in simulate_ensemble(cfg):
        tc = compute_time_change(p, ctx)
        ends.append(time_changed_V(p, ctx, tc, [0.0, 0.8]).states[-1])
    v0 = alternating_poly_sq(ctx, cfg.x0)
    assert ks_two_sample(ends, besq_terminal_samples(2 * k + 1, v0, 0.8, 256, seed=33)).passed


def test_time_change_of_hand_built_path():
    s = build_root_system("A", 3)
    ctx = AlgebraContext(s, MultiplicityFunction.uniform(s, 0.3))
    times = np.linspace(0, 1, 5)
    states = np.array([[0.0, 1.0, 3.0]] * 5)
    tc = compute_time_change(PathRecord(times=times, states=states), ctx)
    assert np.allclose(tc.values, time_change_density(ctx, states[0]) * times)
    # triple point: S = 0, the clock stalls
    flat = compute_time_change(PathRecord(times=times, states=np.ones((5, 3))), ctx)
    assert not flat.strictly_increasing
