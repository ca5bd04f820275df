"""
Invariant suites behind the ``verify`` command.

Each suite returns a list of :class:`Check` records (name, module,
tolerance, observed value, pass flag). The catalogue suites run on a fixed
list of root systems; the configured-system suites use the experiment's own
system and multiplicities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .algebra import (
    AlgebraContext,
    MultiplicityFunction,
    alternating_poly_sq,
    cross_term_sum,
    grad_alternating_poly_sq,
    time_change_density,
    weight,
)
from .besq import besq_terminal_samples
from .fractal import box_counts, calibration_set, fit_dimension
from .rng import gaussian_block
from .roots import (
    build_root_system,
    chamber_project,
    min_wall_distance,
    reflect,
    simple_coefficients,
    verify_root_system,
    wall_distances,
)
from .sde import SimulationConfig, couple_simple_root, simulate_ensemble
from .stats import ks_two_sample, mc_moment_check, monotonicity_audit
from .timechange import compute_time_change

__all__ = [
    "Check",
    "CATALOGUE",
    "catalogue_contexts",
    "interior_points",
    "grad_fd",
    "laplacian_oracle",
    "system_invariants",
    "invariant_checks",
    "run_suites",
]

CATALOGUE = (
    [("A", n) for n in range(2, 7)]
    + [("B", n) for n in range(2, 5)]
    + [("C", 3), ("D", 4)]
    + [("I2", m) for m in range(3, 9)]
)

# a second orbit value used wherever a system has two orbits
TWO_ORBIT_K = (0.2, 0.45)


@dataclass(frozen=True)
class Check:
    name: str
    module: str
    tolerance: str
    observed: float
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "module": self.module,
            "tolerance": self.tolerance,
            "observed": self.observed,
            "pass": self.passed,
            "detail": self.detail,
        }


def catalogue_contexts(k=0.3):
    """Contexts for every catalogue system: uniform ``k``, plus two-orbit values where possible."""
    out = []
    for fam, n in CATALOGUE:
        s = build_root_system(fam, n)
        out.append((f"{fam}{n}", AlgebraContext(s, MultiplicityFunction.uniform(s, k))))
        if s.n_orbits == 2:
            out.append((f"{fam}{n}/2orb", AlgebraContext(s, MultiplicityFunction(TWO_ORBIT_K))))
    return out


def interior_points(system, n, rng, rel_margin=1e-3):
    """``n`` random chamber points at least ``rel_margin * |x|`` from every wall."""
    pts = []
    while len(pts) < n:
        x = chamber_project(rng.standard_normal(system.ambient_dim), system)
        if min_wall_distance(x, system) >= rel_margin * np.linalg.norm(x):
            pts.append(x)
    return np.array(pts)


def grad_fd(ctx, x, rel_step=1e-5):
    """Central differences of ``V`` with step ``rel_step * |x|``."""
    h = rel_step * np.linalg.norm(x)
    g = np.empty(len(x))
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h
        g[i] = (alternating_poly_sq(ctx, x + e) - alternating_poly_sq(ctx, x - e)) / (2 * h)
    return g


def laplacian_oracle(ctx, x):
    """Sum of second partials of ``V`` from values of ``V`` alone.

    Along each coordinate line ``V`` is a polynomial of degree ``2|R+|``;
    interpolating it at that many Chebyshev nodes and differentiating the
    interpolant twice is exact up to rounding.
    """
    deg = 2 * ctx.roots.shape[0]
    r = 0.5 * min_wall_distance(x, ctx.system)
    total = 0.0
    for i in range(len(x)):
        def along(u, i=i):
            pts = np.repeat(x[None, :], len(u), axis=0)
            pts[:, i] += r * u
            return np.prod((pts @ ctx.roots.T) ** 2, axis=1)

        c = cheb.chebinterpolate(along, deg)
        total += cheb.chebval(0.0, cheb.chebder(c, 2)) / r**2
    return float(total)


def _check(name, module, tol_text, observed, passed, detail=""):
    return Check(name, module, tol_text, float(observed), bool(passed), detail)


# ---- catalogue suites -------------------------------------------------------

_EXPECTED_POSITIVE = {"A": lambda n: n * (n - 1) // 2, "B": lambda n: n * n, "C": lambda n: n * n,
                      "D": lambda n: n * (n - 1), "I2": lambda n: n}


def system_invariants(s, rng, n_project=200) -> dict:
    """Worst-case values of the root-system invariants for one system."""
    full = np.vstack([s.positive, -s.positive])
    worst_close = 0.0
    for a in full:
        img = reflect(full, a)
        d = np.abs(img[:, None, :] - full[None, :, :]).max(axis=2).min(axis=1)
        worst_close = max(worst_close, float(d.max()))
    g = s.simple_roots
    off = (g @ g.T)[~np.eye(len(g), dtype=bool)]
    orbit_ok = True
    for b in full:
        for j, v in enumerate(reflect(s.positive, b)):
            target = v if v @ s.chamber_vector > 0 else -v
            orbit_ok &= s.orbit_of(target) == s.orbits[j]
    x = rng.standard_normal((n_project, s.ambient_dim)) * 3
    proj = np.array([chamber_project(p, s) for p in x])
    return {
        "closed_reduced": bool(verify_root_system(full)),
        "reflection_match": worst_close,
        "count_ok": s.n_positive == _EXPECTED_POSITIVE[s.family](s.size),
        "min_coefficient": float(simple_coefficients(s).min()),
        "max_simple_gram": float(off.max()) if off.size else -np.inf,
        "orbits_closed": bool(orbit_ok),
        "min_projected": float((proj @ g.T).min()),
    }


def invariant_checks(results: dict, label="") -> list:
    """Checks from one or several :func:`system_invariants` results keyed by name."""
    vals = list(results.values())
    closure = all(r["closed_reduced"] for r in vals)
    close = max(r["reflection_match"] for r in vals)
    counts = all(r["count_ok"] for r in vals)
    coef = min(r["min_coefficient"] for r in vals)
    gram = max(r["max_simple_gram"] for r in vals)
    orbits = all(r["orbits_closed"] for r in vals)
    proj = min(r["min_projected"] for r in vals)
    sfx = f" ({label})" if label else ""
    return [
        _check("closure and reducedness" + sfx, "root_system", "all pass", float(closure), closure),
        _check("reflections land on roots" + sfx, "root_system", "<= 1e-10", close, close <= 1e-10),
        _check("positive root counts" + sfx, "root_system", "table", float(counts), counts),
        _check("nonnegative simple expansion" + sfx, "root_system", ">= -1e-10", coef, coef >= -1e-10),
        _check("simple roots pairwise obtuse" + sfx, "root_system", "<= 1e-12", gram, gram <= 1e-12),
        _check("orbits closed under reflections" + sfx, "root_system", "all pass", float(orbits), orbits),
        _check("chamber_project lands in chamber" + sfx, "root_system", ">= -1e-10", proj, proj >= -1e-10),
    ]


def roots_suite(rng):
    results = {f"{f}{n}": system_invariants(build_root_system(f, n), rng) for f, n in CATALOGUE}
    return invariant_checks(results, "catalogue")


def algebra_suite(rng, n_points=1000, contexts=None):
    contexts = catalogue_contexts() if contexts is None else contexts
    worst, worst_name = 0.0, ""
    for name, ctx in contexts:
        for x in interior_points(ctx.system, n_points, rng):
            val, scale = cross_term_sum(ctx, x, with_scale=True)
            rel = abs(val) / scale if scale > 0 else abs(val)
            if rel > worst:
                worst, worst_name = rel, name
    checks = [
        _check("cross-term cancellation", "dunkl_algebra", "< 1e-8 of largest term", worst,
               worst < 1e-8, f"worst on {worst_name or 'none'}; {n_points} points per context"),
    ]
    worst_inv = worst_s = worst_w = worst_lin = 0.0
    for name, ctx in contexts:
        s = ctx.system
        ctx1 = AlgebraContext(s, MultiplicityFunction.uniform(s, 1.0))
        scaled = AlgebraContext(s, MultiplicityFunction(tuple(2.5 * k for k in ctx.multiplicity.per_orbit)))
        for x in interior_points(s, 20, rng):
            v = alternating_poly_sq(ctx, x)
            for a in s.positive:
                worst_inv = max(worst_inv, abs(alternating_poly_sq(ctx, reflect(x, a)) - v) / v)
            d = s.positive @ x
            s_int = v * np.sum(s.squared_norms / d**2)
            worst_s = max(worst_s, abs(time_change_density(ctx, x) - s_int) / s_int)
            worst_w = max(worst_w, abs(weight(ctx1, x) - v) / v)
            r1, sc = cross_term_sum(ctx, x, with_scale=True)
            r2 = cross_term_sum(scaled, x)
            worst_lin = max(worst_lin, abs(r2 - 2.5 * r1) / (2.5 * sc) if sc > 0 else abs(r2))
    checks += [
        _check("V invariant under reflections", "dunkl_algebra", "< 1e-10 relative", worst_inv, worst_inv < 1e-10),
        _check("S product form equals interior form", "dunkl_algebra", "< 1e-10 relative", worst_s, worst_s < 1e-10),
        _check("weight equals V at k = 1", "dunkl_algebra", "< 1e-12 relative", worst_w, worst_w < 1e-12),
        _check("cross-term residual linear in k", "dunkl_algebra", "< 1e-12 of largest term", worst_lin,
               worst_lin < 1e-12),
    ]
    return checks


def derivative_suite(rng, n_points=100):
    worst_g = worst_l = 0.0
    for fam, n in CATALOGUE:
        s = build_root_system(fam, n)
        ctx = AlgebraContext(s, MultiplicityFunction.uniform(s, 0.3))
        # central differences with h = 1e-5 |x| carry a truncation error of
        # order (h / wall distance)^2, so points keep 1% of |x| from the walls
        for x in interior_points(s, n_points, rng, rel_margin=1e-2):
            g = grad_alternating_poly_sq(ctx, x)
            worst_g = max(worst_g, np.linalg.norm(grad_fd(ctx, x) - g) / np.linalg.norm(g))
            two_s = 2.0 * time_change_density(ctx, x)
            worst_l = max(worst_l, abs(laplacian_oracle(ctx, x) - two_s) / two_s)
    return [
        _check("gradient vs central differences", "dunkl_algebra", "< 1e-6 relative", worst_g, worst_g < 1e-6),
        _check("Laplacian of V equals 2S", "dunkl_algebra", "< 1e-8 relative", worst_l, worst_l < 1e-8),
    ]


def estimator_suite(depth=12):
    checks = []
    for mode, tol_text, ok in (
        ("interval", "1 +- 0.01", lambda v, t: abs(v - t) <= 0.01),
        ("point", "<= 0.02", lambda v, t: v <= 0.02),
        ("cantor3", "log2/log3 +- 0.02", lambda v, t: abs(v - t) <= 0.02),
        ("cantor4", "0.5 +- 0.02", lambda v, t: abs(v - t) <= 0.02),
    ):
        zs, scales, window, target = calibration_set(mode, depth)
        counts = box_counts(zs, scales)
        slope = fit_dimension(counts, scales, window).slope
        checks.append(_check(f"{mode} slope", "fractal", tol_text, slope, ok(slope, target)))
        monotone = bool(np.all(np.diff(counts) >= 0))
        checks.append(_check(f"{mode} counts monotone in scale", "fractal", "exact", float(monotone), monotone))
        if mode == "cantor3":
            exact = bool(np.array_equal(counts, 2 ** np.arange(depth + 1)))
            checks.append(_check("cantor3 counts equal 2^j", "fractal", "exact", float(exact), exact))
    return checks


def sampler_suite(seed=0):
    z = gaussian_block(seed, 0, 0, 1000, 1000).ravel()
    mean, var = float(z.mean()), float(z.var())
    m = mc_moment_check(besq_terminal_samples(1.6, 1.0, 1.0, 1024, seed), 2.6)
    g = besq_terminal_samples(1.6, 0.0, 0.7, 512, seed + 1) / 0.7
    direct = np.random.default_rng(seed + 2).gamma(0.8, 2.0, 512)
    ks = ks_two_sample(g, direct)
    return [
        _check("driver mean of 1e6 draws", "sde_engine", "|mean| < 4e-3", mean, abs(mean) < 4e-3),
        _check("driver variance of 1e6 draws", "sde_engine", "[0.994, 1.006]", var, 0.994 <= var <= 1.006),
        _check("BESQ(1.6) mean at t = 1", "stats", "|z| <= 3", m.z, m.passed),
        _check("BESQ from 0 vs chi-square", "stats", "KS at 1%", ks.statistic, ks.passed),
    ]


# ---- configured-system suites ----------------------------------------------

def configured_suite(exp, rng, fault=None):
    """Cross-term, coupling and clock checks on the configured system."""
    ctx = AlgebraContext(exp.system, exp.multiplicity)
    sim = SimulationConfig(
        system=exp.system, multiplicity=exp.multiplicity, x0=exp.x0, T=0.1, dt=1e-5,
        theta=exp.theta, max_substeps=exp.max_substeps, seed=exp.seed, path_count=8,
    )
    if fault == "drift":
        broken = ctx.k.copy()
        broken[0] *= 2.0
        broken.setflags(write=False)
        object.__setattr__(ctx, "k", broken)
        object.__setattr__(sim.ctx, "k", broken)
    elif fault is not None:
        raise ValueError(f"unknown fault {fault!r}")
    name = f"{exp.family}{exp.size}"
    worst = 0.0
    for x in interior_points(exp.system, 1000, rng):
        val, scale = cross_term_sum(ctx, x, with_scale=True)
        worst = max(worst, abs(val) / scale if scale > 0 else abs(val))
    checks = [_check(f"cross-term cancellation on {name}", "dunkl_algebra", "< 1e-8 of largest term",
                     worst, worst < 1e-8)]
    worst_c = 0.0
    for beta in exp.system.simple_roots:
        for i in range(sim.path_count):
            y, z = couple_simple_root(sim, beta, i)
            scale = max(1.0, float(z.states.max()))
            worst_c = max(worst_c, float((y.states - z.states).max()) / scale)
    checks.append(_check(f"coupling Y <= Z on {name}", "sde_engine", "<= 1e-3 max(1, max Z)", worst_c,
                         worst_c <= 1e-3, "8 paths, T = 0.1, dt = 1e-5"))
    paths = simulate_ensemble(SimulationConfig(
        system=exp.system, multiplicity=exp.multiplicity, x0=exp.x0, T=0.1, dt=1e-4,
        seed=exp.seed, path_count=16,
    ))
    flat = sum(monotonicity_audit(compute_time_change(p, ctx)).flat_count for p in paths)
    inside = min(float(wall_distances(p.states, exp.system).min()) for p in paths)
    checks += [
        _check(f"clock strictly increasing on {name}", "stats", "flat_count = 0", flat, flat == 0,
               "16 paths, T = 0.1, dt = 1e-4"),
        _check(f"paths stay in chamber on {name}", "sde_engine", ">= -1e-10", inside, inside >= -1e-10),
    ]
    return checks


def run_suites(exp, fault=None):
    """All suites for ``verify``; ``exp.suite == 'full'`` adds the statistical acceptance checks."""
    rng = np.random.default_rng(exp.seed)
    checks = []
    checks += roots_suite(rng)
    checks += algebra_suite(rng)
    checks += derivative_suite(rng)
    checks += estimator_suite(exp.cantor_depth)
    checks += sampler_suite(exp.seed)
    checks += configured_suite(exp, rng, fault=fault)
    if exp.suite == "full":
        from .acceptance import statistical_checks

        checks += statistical_checks()
    return checks
