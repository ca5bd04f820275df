import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from radial_dunkl.algebra import AlgebraContext, MultiplicityFunction
from radial_dunkl.besq import besq_terminal_samples, simulate_besq_exact
from radial_dunkl.roots import build_root_system
from radial_dunkl.sde import PathRecord, SimulationConfig, simulate_ensemble, simulate_radial_dunkl
from radial_dunkl.stats import (
    KS_CONST_1PCT,
    ks_two_sample,
    mc_moment_check,
    monotonicity_audit,
    quadratic_variation_diagnostic,
)
from radial_dunkl.timechange import TimeChange, compute_time_change


def test_ks_identical_and_disjoint():
    a = np.random.default_rng(0).normal(size=100)
    r = ks_two_sample(a, a)
    assert r.statistic == 0.0 and r.passed
    grid = np.arange(64) / 64
    r = ks_two_sample(grid, grid + 1)
    assert r.statistic == 1.0 and not r.passed
    assert r.critical_1pct == pytest.approx(KS_CONST_1PCT * np.sqrt(128 / 64**2))


def test_ks_small_samples_rejected():
    with pytest.raises(ValueError):
        ks_two_sample(np.zeros(29), np.zeros(40))


def test_ks_level_on_seed_pairs():
    passes = 0
    for i in range(100):
        a = np.random.default_rng(2 * i).normal(size=512)
        b = np.random.default_rng(2 * i + 1).normal(size=512)
        passes += ks_two_sample(a, b).passed
    assert passes >= 95


def test_ks_rejection_frequency_under_null():
    rejections = 0
    for i in range(200):
        a = np.random.default_rng(10_000 + i).normal(size=256)
        b = np.random.default_rng(20_000 + i).normal(size=256)
        rejections += not ks_two_sample(a, b).passed
    assert rejections / 200 <= 0.03


def test_moment_check_examples():
    m = mc_moment_check(np.full(200, 2.5), 2.5)
    assert m.passed and m.z == 0.0
    draws = besq_terminal_samples(1.6, 1.0, 1.0, 1024, seed=1)
    assert mc_moment_check(draws, 2.6).passed
    x = np.random.default_rng(3).normal(size=400)
    assert not mc_moment_check(x, x.mean() + 10 * x.std()).passed
    with pytest.raises(ValueError):
        mc_moment_check(np.zeros(50), 0.0)


def test_moment_check_variance_bound_reported():
    x = np.random.default_rng(4).normal(size=500)
    assert mc_moment_check(x, 0.0, target_variance_bound=2.0).variance_ok
    assert not mc_moment_check(x, 0.0, target_variance_bound=0.5).variance_ok


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 100.0), st.integers(0, 2**31), st.floats(-6, 6))
def test_moment_check_scale_equivariant(c, seed, shift):
    # z exactly at the 3-sigma edge is decided by rounding
    assume(abs(abs(shift) - 3.0) > 1e-6)
    x = np.random.default_rng(seed).normal(size=150)
    target = x.mean() + shift * x.std(ddof=1) / np.sqrt(len(x))
    assert mc_moment_check(x, target).passed == mc_moment_check(c * x, c * target).passed


def test_qv_exact_besq_path():
    grid = np.linspace(0, 1, 100_001)
    r = quadratic_variation_diagnostic(simulate_besq_exact(2.6, 1.0, grid, 5, 0))
    assert 0.9 <= r <= 1.1


def test_qv_deterministic_path_is_small():
    t = np.linspace(0, 1, 1001)
    assert quadratic_variation_diagnostic(PathRecord(t, t.copy())) < 0.01


def test_qv_errors():
    t = np.linspace(0, 1, 11)
    with pytest.raises(ValueError):
        quadratic_variation_diagnostic(PathRecord(t, np.zeros(11)))
    with pytest.raises(ValueError):
        quadratic_variation_diagnostic(PathRecord(t, -np.ones(11)))


def test_qv_converges_over_dyadic_refinement():
    """Sampling one exact path at dt, 2dt, 4dt: the ratio moves toward 1 as dt shrinks, up to noise."""
    grid = np.linspace(0, 1, 2**16 + 1)
    y = simulate_besq_exact(1.6, 1.0, grid, 9, 0)
    ratios = []
    for step in (4, 2, 1):
        sub = PathRecord(y.times[::step], y.states[::step])
        ratios.append(quadratic_variation_diagnostic(sub))
    errs = [abs(r - 1) for r in ratios]
    assert errs[-1] <= max(errs[:-1]) + 0.02


def test_monotonicity_examples():
    dt = 1e-3
    s = build_root_system("A", 2)
    m = MultiplicityFunction((0.3,))
    cfg = SimulationConfig(system=s, multiplicity=m, T=0.5, dt=dt)
    rep = monotonicity_audit(compute_time_change(simulate_radial_dunkl(cfg, 0), AlgebraContext(s, m)))
    assert rep.strict and rep.min_increment == pytest.approx(2 * dt)
    flat = monotonicity_audit(TimeChange(np.full(11, 3.0), 0.1))
    assert not flat.strict and flat.flat_count == 10


def test_a2_interior_clock_is_strict():
    s = build_root_system("A", 3)
    m = MultiplicityFunction.uniform(s, 0.3)
    ctx = AlgebraContext(s, m)
    cfg = SimulationConfig(system=s, multiplicity=m, T=0.5, dt=1e-4, path_count=20, seed=6)
    for p in simulate_ensemble(cfg):
        assert monotonicity_audit(compute_time_change(p, ctx)).flat_count == 0
