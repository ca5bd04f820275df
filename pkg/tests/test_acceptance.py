"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the
``acceptance criteria`` section of the pytest summary.
"""
import time

import numpy as np
import pytest

from radial_dunkl import acceptance
from radial_dunkl.cli import EXIT_OK, main
from radial_dunkl.verify import algebra_suite, catalogue_contexts, derivative_suite, estimator_suite


def summarise(checks):
    return "; ".join(f"{c.name} = {c.observed:.4g} ({c.tolerance})" for c in checks)


def finish(record, index, title, checks, extra_ok=True, extra=""):
    ok = all(c.passed for c in checks) and extra_ok
    record(index, title, ok, summarise(checks) + (f"; {extra}" if extra else ""))
    failed = [c.name + ": " + c.detail for c in checks if not c.passed]
    assert ok, failed or extra


def test_cross_term_identity(acceptance_record):
    contexts = catalogue_contexts()
    # both multiplicity shapes are present for every two-orbit system
    assert any(name.endswith("/2orb") for name, _ in contexts)
    t0 = time.perf_counter()
    checks = algebra_suite(np.random.default_rng(2024), n_points=1000, contexts=contexts)[:1]
    elapsed = time.perf_counter() - t0
    finish(acceptance_record, 1, "cross-term cancellation, 1000 points per system", checks,
           elapsed < 10, f"runtime {elapsed:.2f} s (< 10 s)")


def test_derivative_identities(acceptance_record):
    t0 = time.perf_counter()
    checks = derivative_suite(np.random.default_rng(2025), n_points=100)
    elapsed = time.perf_counter() - t0
    finish(acceptance_record, 2, "gradient and Laplacian vs oracles", checks,
           elapsed < 10, f"runtime {elapsed:.2f} s (< 10 s)")


def test_estimator_calibration(acceptance_record):
    t0 = time.perf_counter()
    checks = [c for c in estimator_suite(12) if c.name.endswith("slope")]
    elapsed = time.perf_counter() - t0
    finish(acceptance_record, 3, "box-counting calibration", checks,
           elapsed < 5, f"runtime {elapsed:.2f} s (< 5 s)")


def test_besq_zero_set_dimension(acceptance_record):
    checks = [acceptance.besq_dimension(k) for k in (0.1, 0.25, 0.4)]
    finish(acceptance_record, 4, "exact BESQ zero-set slope = 1/2 - k", checks)


def test_uniform_collision_dimension(acceptance_record):
    finish(acceptance_record, 5, "A2 uniform k = 0.25 collision slope", acceptance.chamber_dimension("A2"))


def test_two_orbit_collision_dimension(acceptance_record):
    finish(acceptance_record, 6, "B2 k = (0.2 short, 0.45 long) collision slope",
           acceptance.chamber_dimension("B2"))


def test_no_collision_regime(acceptance_record):
    finish(acceptance_record, 7, "A2 k = 0.75 stays off the walls", acceptance.no_collision())


def test_time_change_law(acceptance_record):
    finish(acceptance_record, 8, "time-changed V is BESQ(1.6)", acceptance.time_change_law())


def test_coupling_bound(acceptance_record):
    finish(acceptance_record, 9, "simple-root coupling Y <= Z", acceptance.coupling_bound())


def test_monotone_clock(acceptance_record):
    finish(acceptance_record, 10, "clock strictly increasing", acceptance.monotone_clock())


DETERMINISM_RUNS = {
    "roots": ["--family", "B", "--size", "3"],
    "simulate": ["--family", "B", "--size", "2", "--multiplicities", "0.2, 0.45", "--T", "0.1",
                 "--dt", "1e-4", "--path_count", "4", "--write_csv", "true"],
    "timechange": ["--family", "A", "--size", "3", "--multiplicities", "0.3", "--T", "0.05", "--dt", "1e-5",
                   "--path_count", "8", "--clock_target", "0.5"],
    "dim": ["--family", "A", "--size", "3", "--T", "1", "--dt", "1e-4", "--path_count", "8",
            "--start_distance", "0.1"],
    "couple": ["--family", "I2", "--size", "4", "--multiplicities", "0.25, 0.4", "--T", "0.1", "--dt", "1e-5",
               "--path_count", "4"],
    "verify": [],
}


def tree_bytes(root):
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_determinism(tmp_path, acceptance_record):
    problems = []
    n_files = 0
    for command, args in DETERMINISM_RUNS.items():
        trees = []
        for run in ("a", "b"):
            out = tmp_path / command / run
            code = main([command, *args, "--out", str(out)])
            if code != EXIT_OK:
                problems.append(f"{command} exited {code}")
            trees.append(tree_bytes(out))
        if trees[0] != trees[1] or not trees[0]:
            problems.append(f"{command} outputs differ")
        n_files += sum(name.endswith((".json", ".bin")) for name in trees[0])
    ok = not problems
    acceptance_record(11, "byte-identical reruns of every command", ok,
                      f"{n_files} .json/.bin files compared" + (f"; {problems}" if problems else ""))
    assert ok, problems
