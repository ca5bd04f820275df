"""
Desk-scale statistical reproductions: collision-set dimensions, the
no-collision regime, the law of the time-changed ``V``, the simple-root
coupling and clock monotonicity. Each function returns ``Check`` records
at fixed seeds; ``verify`` runs them when ``suite = full``.
"""
from __future__ import annotations

import numpy as np

from .algebra import AlgebraContext, MultiplicityFunction, alternating_poly_sq
from .besq import besq_terminal_samples, simulate_besq_exact
from .fractal import extract_collision_times, extract_zero_times, estimate_zero_dim_ensemble
from .roots import build_root_system, wall_distances
from .sde import SimulationConfig, couple_simple_root, default_start, simulate_ensemble
from .stats import ks_two_sample, monotonicity_audit, quadratic_variation_diagnostic
from .timechange import compute_time_change, time_changed_V
from .verify import Check

__all__ = [
    "b2_multiplicity",
    "besq_dimension",
    "chamber_dimension",
    "no_collision",
    "time_change_law",
    "coupling_bound",
    "monotone_clock",
    "statistical_checks",
]


def b2_multiplicity(system, k_short=0.2, k_long=0.45):
    """Per-orbit values for ``B`` with ``k_short`` on the short roots."""
    short = system.orbit_of(np.eye(system.ambient_dim)[0])
    vals = [k_long] * system.n_orbits
    vals[short] = k_short
    return MultiplicityFunction(tuple(vals))


def besq_dimension(k, dt=1e-6, paths=32, seed=11, tol=0.08):
    """Zero-set slope of exact BESQ(2k + 1) from 0; the set is ``{sqrt(Y) <= sqrt(dt)}``."""
    grid = np.arange(int(round(1 / dt)) + 1) * dt
    eps = np.sqrt(dt)
    zs = []
    for i in range(paths):
        y = simulate_besq_exact(2 * k + 1, 0.0, grid, seed, i)
        zs.append(extract_zero_times(grid, np.sqrt(y.states), eps))
    est = estimate_zero_dim_ensemble(zs)
    target = 0.5 - k
    return Check(f"BESQ k = {k} zero-set slope", "fractal", f"{target:g} +- {tol}", est.slope,
                 abs(est.slope - target) <= tol, f"IQR {est.iqr:.3f}, {paths} paths, dt = {dt:g}")


def _chamber_estimate(system, mult, dt, paths, seed, start_distance, eps_coeff=1.0):
    cfg = SimulationConfig(system=system, multiplicity=mult, x0=default_start(system, start_distance),
                           T=1.0, dt=dt, seed=seed, path_count=paths)
    zs = [extract_collision_times(p, system, eps_coeff) for p in simulate_ensemble(cfg)]
    return estimate_zero_dim_ensemble(zs)


def chamber_dimension(case="A2", dt=1e-5, paths=32, seed=1, start_distance=0.1, tol=0.10):
    """Collision-set slope for uniform ``k = 0.25`` on A2 or the two-orbit B2 case."""
    if case == "A2":
        system = build_root_system("A", 3)
        mult = MultiplicityFunction.uniform(system, 0.25)
    elif case == "B2":
        system = build_root_system("B", 2)
        mult = b2_multiplicity(system)
    else:
        raise ValueError(case)
    target = 0.5 - mult.minimum
    est = _chamber_estimate(system, mult, dt, paths, seed, start_distance)
    checks = [Check(f"{case} collision slope", "fractal", f"{target:g} +- {tol}", est.slope,
                    abs(est.slope - target) <= tol, f"IQR {est.iqr:.3f}, start distance {start_distance}")]
    if case == "A2":
        checks.append(Check("A2 empty fraction", "fractal", "< 0.2", est.empty_fraction,
                            est.empty_fraction < 0.2))
    return checks


def no_collision(dt=1e-5, paths=32, seed=1):
    system = build_root_system("A", 3)
    cfg = SimulationConfig(system=system, multiplicity=MultiplicityFunction.uniform(system, 0.75),
                           T=1.0, dt=dt, seed=seed, path_count=paths)
    eps = np.sqrt(dt)
    near = total = empty = 0
    for p in simulate_ensemble(cfg):
        d = wall_distances(p.states, system).min(axis=1)
        near += int(np.sum(d <= eps))
        total += d.size
        empty += int(not np.any(d <= eps))
    frac = near / total
    return [
        Check("k = 0.75 grid points within eps of walls", "fractal", "< 0.001", frac, frac < 1e-3),
        Check("k = 0.75 paths with empty zero set", "fractal", "> 0.99", empty / paths, empty / paths > 0.99),
    ]


def time_change_law(seeds=(1, 2, 3, 4, 5), paths=256, dt=5e-7, T=0.02, target=0.5, grid_points=1001):
    """KS of the time-changed V at clock time ``target`` against exact BESQ(2k + 1) draws."""
    k = 0.3
    system = build_root_system("A", 3)
    mult = MultiplicityFunction.uniform(system, k)
    ctx = AlgebraContext(system, mult)
    out_grid = np.linspace(0.0, target, grid_points)
    passes, ratios, short = 0, [], 0
    details = []
    for seed in seeds:
        cfg = SimulationConfig(system=system, multiplicity=mult, T=T, dt=dt, seed=seed, path_count=paths)
        v0 = alternating_poly_sq(ctx, cfg.x0)
        ends, seed_ratios = [], []
        for p in simulate_ensemble(cfg):
            tc = compute_time_change(p, ctx)
            if tc.total < target:
                short += 1
                continue
            y = time_changed_V(p, ctx, tc, out_grid)
            ends.append(y.states[-1])
            seed_ratios.append(quadratic_variation_diagnostic(y))
        ref = besq_terminal_samples(2 * k + 1, v0, target, paths, seed=1000 + seed)
        ks = ks_two_sample(ends, ref)
        passes += ks.passed
        ratios.append(float(np.median(seed_ratios)))
        details.append(f"seed {seed}: D = {ks.statistic:.3f} / {ks.critical_1pct:.3f}")
    worst = max(ratios, key=lambda r: abs(r - 1))
    return [
        Check("time-changed V vs BESQ(1.6), KS at 1%", "stats", ">= 4 of 5 seeds pass", passes,
              passes >= 4 and short == 0, "; ".join(details) + f"; short clocks {short}"),
        Check("time-changed V quadratic variation ratio", "stats", "[0.85, 1.15]", worst,
              all(0.85 <= r <= 1.15 for r in ratios), "median over paths, per seed: "
              + ", ".join(f"{r:.3f}" for r in ratios)),
    ]


COUPLING_CASES = (
    ("B", 2, None),
    ("A", 4, (0.3,)),
    ("I2", 4, (0.25, 0.4)),
)


def coupling_bound(dt=1e-5, paths=100, seed=7, T=1.0):
    checks = []
    for fam, n, ks in COUPLING_CASES:
        system = build_root_system(fam, n)
        mult = b2_multiplicity(system) if ks is None else MultiplicityFunction(ks)
        cfg = SimulationConfig(system=system, multiplicity=mult, T=T, dt=dt, seed=seed, path_count=paths)
        worst = -np.inf
        for beta in system.simple_roots:
            for i in range(paths):
                y, z = couple_simple_root(cfg, beta, i)
                worst = max(worst, float((y.states - z.states).max()) / max(1.0, float(z.states.max())))
        label = f"I2({n})" if fam == "I2" else f"{fam}{n - 1 if fam == 'A' else n} (ambient {n})"
        checks.append(Check(f"coupling Y <= Z on {label}", "sde_engine", "<= 1e-3 max(1, max Z)", worst,
                            worst <= 1e-3, f"{paths} paths per simple root, dt = {dt:g}"))
    system = build_root_system("A", 2)
    cfg = SimulationConfig(system=system, multiplicity=MultiplicityFunction((0.3,)), T=T, dt=dt,
                           seed=seed, path_count=paths)
    beta = system.simple_roots[0]
    worst = max(float(np.abs(y.states - z.states).max())
                for y, z in (couple_simple_root(cfg, beta, i) for i in range(paths)))
    checks.append(Check("rank-1 coupling is exact", "sde_engine", "<= 1e-12", worst, worst <= 1e-12))
    return checks


def monotone_clock(paths=100, dt=1e-4, seed=3, k=0.25):
    system = build_root_system("A", 3)
    mult = MultiplicityFunction.uniform(system, k)
    ctx = AlgebraContext(system, mult)
    cfg = SimulationConfig(system=system, multiplicity=mult, T=1.0, dt=dt, seed=seed, path_count=paths)
    reports = [monotonicity_audit(compute_time_change(p, ctx)) for p in simulate_ensemble(cfg)]
    flat = sum(r.flat_count for r in reports)
    return [Check("A2 clock strictly increasing", "stats", "flat_count = 0 on every path", flat, flat == 0,
                  f"{paths} paths, smallest increment {min(r.min_increment for r in reports):.3g}")]


def statistical_checks():
    checks = []
    for k in (0.1, 0.25, 0.4):
        checks.append(besq_dimension(k))
    checks += chamber_dimension("A2")
    checks += chamber_dimension("B2")
    checks += no_collision()
    checks += time_change_law()
    checks += coupling_bound()
    checks += monotone_clock()
    return checks
