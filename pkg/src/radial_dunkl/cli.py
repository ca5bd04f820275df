"""
Command-line experiment runner.

    python -m radial_dunkl <command> [--config FILE] [--key value ...]

Commands: roots, simulate, timechange, dim, couple, verify. Every key of
:data:`radial_dunkl.config.SCHEMA` is accepted as ``--key value`` and
overrides the file. Exit status: 0 ok, 2 invalid configuration, 3 a
validation check failed, 4 runtime failure.

All outputs go to ``--out`` (default ``results``) and are written by this
process only after the work is done; every artifact carries the config hash.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .algebra import AlgebraContext, alternating_poly_sq
from .besq import besq_terminal_samples, simulate_besq_exact
from .config import SCHEMA, ConfigError, ExperimentConfig, load_config
from .fractal import (
    EstimatorError,
    box_counts,
    calibration_set,
    dyadic_scales,
    estimate_zero_dim_ensemble,
    extract_collision_times,
    extract_zero_times,
    fit_dimension,
)
from .io import csv_text, dump_json, loglog_svg, path_bytes, path_csv_text
from .roots import wall_distances
from .sde import IntegrationError, couple_simple_root, simulate_ensemble
from .stats import ks_two_sample, monotonicity_audit, quadratic_variation_diagnostic
from .timechange import TimeChangeError, compute_time_change, time_changed_V

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_CONFIG", "EXIT_VALIDATION", "EXIT_RUNTIME"]

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3, 4

COMMANDS = ("roots", "simulate", "timechange", "dim", "couple", "verify")
_HELP = {
    "roots": "build the root system and print positive roots, simple roots and orbits",
    "simulate": "simulate an ensemble; write path files and a summary",
    "timechange": "run V on the random clock and compare with squared Bessel draws",
    "dim": "box-counting dimension of collision times, or an estimator calibration",
    "couple": "check Y <= Z on every simple root with shared noise",
    "verify": "run the invariant suites; nonzero exit if any check fails",
}


class ValidationFailure(Exception):
    """A command's own checks failed; outputs (if any) are still written."""


class _Outputs:
    """Collects files in memory; nothing touches disk until :meth:`flush`."""

    def __init__(self, root):
        self.root = Path(root)
        self.files = {}

    def text(self, name, content):
        self.files[name] = content.encode()

    def json(self, name, obj):
        self.text(name, dump_json(obj))

    def flush(self):
        for name, data in self.files.items():
            path = self.root / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)


def _header(exp: ExperimentConfig, command: str) -> dict:
    return {"command": command, "config_hash": exp.hash, "config": exp.result_dict()}


def _window(exp, scales):
    ok = np.flatnonzero(
        (scales >= exp.fit_fine * exp.dt * (1 - 1e-12)) & (scales <= exp.T / exp.fit_coarse * (1 + 1e-12))
    )
    if ok.size < 4:
        raise EstimatorError("fewer than 4 dyadic scales between fit_fine * dt and T / fit_coarse")
    return int(ok[0]), int(ok[-1]) + 1


# ---- commands --------------------------------------------------------------

def cmd_roots(exp: ExperimentConfig, out: _Outputs):
    from .verify import invariant_checks, system_invariants

    s = exp.system
    checks = invariant_checks({"configured": system_invariants(s, np.random.default_rng(exp.seed))})
    doc = s.to_dict()
    doc.update({
        "config_hash": exp.hash,
        "config": exp.result_dict(),
        "counts": {"positive": s.n_positive, "simple": len(s.simple), "orbits": s.n_orbits},
        "checks": [c.to_dict() for c in checks],
    })
    out.json("roots.json", doc)
    print(dump_json(doc), end="")
    if not all(c.passed for c in checks):
        raise ValidationFailure("root system failed its invariants")


def cmd_simulate(exp: ExperimentConfig, out: _Outputs):
    cfg = exp.simulation()
    paths = simulate_ensemble(cfg, threads=exp.thread_count)
    eps = exp.epsilon_coeff * np.sqrt(exp.dt)
    edges = [0.0] + [eps * 10.0**j for j in range(0, 7)]
    hist = np.zeros(len(edges), dtype=np.int64)
    per_path = []
    near = total = 0
    for p in paths:
        d = wall_distances(p.states, exp.system).min(axis=1)
        hist += np.bincount(np.searchsorted(edges, d, side="left").clip(1) - 1, minlength=len(edges))
        hits = int(np.sum(d <= eps))
        near += hits
        total += d.size
        stem = f"paths/path_{p.path_index:05d}"
        _write_path(out, p, stem, exp)
        per_path.append({
            "path_index": p.path_index,
            "file": stem + ".bin",
            "min_wall_distance": float(d.min()),
            "hit_points": hits,
            **p.stats,
        })
    substeps = np.array([r["substeps"] for r in per_path], dtype=float)
    summary = _header(exp, "simulate")
    summary.update({
        "epsilon": eps,
        "n_paths": len(paths),
        "n_steps": cfg.n_steps,
        "min_wall_distance_histogram": {
            "edges": [float(e) for e in edges],
            "counts": [int(c) for c in hist[:-1]],
            "above_last_edge": int(hist[-1]),
            "unit": "grid points; bin j is (edges[j], edges[j+1]], the first bin includes 0",
        },
        "fraction_points_within_epsilon": near / total,
        "fraction_paths_hitting": float(np.mean([r["hit_points"] > 0 for r in per_path])),
        "substeps": {
            "per_macro_step_mean": float(substeps.sum() / (cfg.n_steps * len(paths))),
            "max_depth": int(max(r["max_depth"] for r in per_path)),
            "floored_steps": int(sum(r["floored_steps"] for r in per_path)),
            "snaps": int(sum(r["snaps"] for r in per_path)),
        },
        "paths": per_path,
    })
    out.json("summary.json", summary)
    print(f"simulated {len(paths)} paths; hitting fraction {summary['fraction_paths_hitting']:.3f}; "
          f"points within eps {summary['fraction_points_within_epsilon']:.2e}")


def _write_path(out, p, stem, exp):
    payload, header = path_bytes(p, exp.hash)
    out.files[stem + ".bin"] = payload
    out.text(stem + ".json", header)
    if exp.write_csv == "true":
        out.text(stem + ".csv", path_csv_text(p))


def cmd_timechange(exp: ExperimentConfig, out: _Outputs):
    cfg = exp.simulation()
    ctx = AlgebraContext(exp.system, exp.multiplicity)
    target = exp.clock_target
    grid = np.linspace(0.0, target, 1001)
    rows, ends, ratios = [], [], []
    for p in simulate_ensemble(cfg, threads=exp.thread_count):
        tc = compute_time_change(p, ctx)
        audit = monotonicity_audit(tc)
        row = {"path_index": p.path_index, "s_M": tc.total, "flat_count": audit.flat_count,
               "min_increment": audit.min_increment, "y_target": None, "qv_ratio": None}
        if tc.total >= target and audit.strict:
            y = time_changed_V(p, ctx, tc, grid)
            row["y_target"] = float(y.states[-1])
            row["qv_ratio"] = quadratic_variation_diagnostic(y)
            ends.append(row["y_target"])
            ratios.append(row["qv_ratio"])
        rows.append(row)
    v0 = alternating_poly_sq(ctx, cfg.x0)
    uniform = len(set(exp.multiplicity.per_orbit)) == 1
    report = _header(exp, "timechange")
    report.update({
        "V_x0": v0,
        "clock_target": target,
        "paths_reaching_target": len(ends),
        "flat_paths": sum(r["flat_count"] > 0 for r in rows),
        "qv_ratio_median": float(np.median(ratios)) if ratios else None,
        "paths": rows,
    })
    if uniform and len(ends) >= 30:
        k = exp.multiplicity.per_orbit[0]
        ref = besq_terminal_samples(2 * k + 1, v0, target, len(ends), seed=exp.seed + 1000)
        report["ks_vs_besq"] = {"delta": 2 * k + 1, **ks_two_sample(ends, ref).to_dict()}
    else:
        report["ks_vs_besq"] = None
        report["ks_skipped"] = "needs uniform multiplicity and >= 30 paths reaching the target"
    out.json("timechange.json", report)
    write_rows = [[r["path_index"], r["s_M"], r["flat_count"], r["min_increment"],
                   np.nan if r["y_target"] is None else r["y_target"],
                   np.nan if r["qv_ratio"] is None else r["qv_ratio"]] for r in rows]
    out.text("timechange.csv", csv_text(["path_index", "s_M", "flat_count", "min_increment",
                                          "y_target", "qv_ratio"], write_rows))
    ks = report["ks_vs_besq"]
    print(f"{len(ends)} paths reach clock {target:g}; flat paths {report['flat_paths']}; "
          + (f"KS D = {ks['statistic']:.3f} (crit {ks['critical_1pct']:.3f})" if ks else "KS skipped"))


def cmd_dim(exp: ExperimentConfig, out: _Outputs):
    mode = exp.calibrate
    result = _header(exp, "dim")
    if mode in ("interval", "point", "cantor3", "cantor4"):
        zs, scales, window, target = calibration_set(mode, exp.cantor_depth)
        est = fit_dimension(box_counts(zs, scales), scales, window)
        result.update(est.to_dict())
        result["empty_fraction"] = 0.0
        counts = est.counts
        title = f"calibration: {mode}"
    else:
        if mode == "besq":
            if exp.k is None:
                raise ConfigError("k: required with calibrate = besq")
            grid = np.arange(int(round(exp.T / exp.dt)) + 1) * exp.dt
            eps = exp.epsilon_coeff * np.sqrt(exp.dt)
            zsets = [
                extract_zero_times(grid, np.sqrt(simulate_besq_exact(2 * exp.k + 1, 0.0, grid, exp.seed, i).states), eps)
                for i in range(exp.path_count)
            ]
            target = max(0.0, 0.5 - exp.k)
            title = f"BESQ({2 * exp.k + 1:g}) from 0"
        else:
            paths = simulate_ensemble(exp.simulation(), threads=exp.thread_count)
            zsets = [extract_collision_times(p, exp.system, exp.epsilon_coeff) for p in paths]
            target = max(0.0, 0.5 - exp.multiplicity.minimum)
            title = f"{exp.family}{exp.size} collision times"
        scales = dyadic_scales(exp.T, exp.dt)
        window = _window(exp, scales)
        est = estimate_zero_dim_ensemble(zsets, scales, window)
        result.update(est.to_dict())
        counts = est.counts
    result["mode"] = mode or "simulation"
    result["target"] = float(target)
    result["slope_in_range"] = bool(-0.05 <= result["slope"] <= 1.05)
    lo, hi = result["window"]
    xs = np.log(1.0 / np.asarray(scales[lo:hi]))
    ys = np.log(np.maximum(np.asarray(counts[lo:hi], dtype=float), 1e-300))
    intercept = float(ys.mean() - result["slope"] * xs.mean())
    note = f"slope {result['slope']:.4f} +- {result['stderr']:.4f}, target {target:.4f}, hash {exp.hash}"
    out.json("dim.json", result)
    out.text("dim.svg", loglog_svg(scales, counts, result["slope"], intercept, (lo, hi), title, note))
    print(note)


def cmd_couple(exp: ExperimentConfig, out: _Outputs):
    cfg = exp.simulation()
    rank1 = exp.system.n_positive == 1
    roots = []
    ok = True
    for j, beta in enumerate(exp.system.simple_roots):
        worst, worst_abs = -np.inf, 0.0
        for i in range(exp.path_count):
            y, z = couple_simple_root(cfg, beta, i)
            diff = y.states - z.states
            worst = max(worst, float(diff.max()) / max(1.0, float(z.states.max())))
            worst_abs = max(worst_abs, float(np.abs(diff).max()))
        passed = worst_abs <= 1e-12 if rank1 else worst <= 1e-3
        ok &= passed
        roots.append({"simple_index": j, "root": [float(c) for c in beta],
                      "max_relative_excess": worst, "max_abs_difference": worst_abs,
                      "tolerance": "|Y - Z| <= 1e-12" if rank1 else "Y - Z <= 1e-3 max(1, max Z)",
                      "pass": bool(passed)})
    report = _header(exp, "couple")
    report.update({"simple_roots": roots, "pass": bool(ok)})
    out.json("couple.json", report)
    for r in roots:
        print(f"simple root {r['simple_index']}: max excess {r['max_relative_excess']:.3e} "
              f"{'pass' if r['pass'] else 'FAIL'}")
    if not ok:
        raise ValidationFailure("coupling bound violated")


def cmd_verify(exp: ExperimentConfig, out: _Outputs, fault=None):
    from .verify import run_suites

    checks = run_suites(exp, fault=fault)
    failed = [c.name for c in checks if not c.passed]
    report = _header(exp, "verify")
    report.update({"checks": [c.to_dict() for c in checks], "pass": not failed, "failed": failed})
    out.json("verify.json", report)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  [{c.module}] {c.name}: {c.observed:.4g} ({c.tolerance})")
    if failed:
        raise ValidationFailure(f"{len(failed)} checks failed")


_COMMANDS = {
    "roots": cmd_roots,
    "simulate": cmd_simulate,
    "timechange": cmd_timechange,
    "dim": cmd_dim,
    "couple": cmd_couple,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radial_dunkl", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=_HELP[name], description=_HELP[name])
        p.add_argument("--config", help="key = value configuration file")
        for key, (_, default, _, text) in SCHEMA.items():
            p.add_argument(f"--{key}", dest=key, default=None, help=f"{text} (default {default})")
        if name == "verify":
            p.add_argument("--inject-fault", dest="fault", default=None, help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in SCHEMA}
    try:
        exp = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _Outputs(exp.out)
    kwargs = {"fault": args.fault} if args.command == "verify" else {}
    status = EXIT_OK
    try:
        _COMMANDS[args.command](exp, out, **kwargs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationFailure as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        status = EXIT_VALIDATION
    except IntegrationError as exc:
        print(f"integration failed on path {exc.path_index}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (EstimatorError, TimeChangeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    out.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
