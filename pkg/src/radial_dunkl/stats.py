"""
Statistical checks used by the verification suites.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as _st

from .sde import PathRecord
from .timechange import TimeChange

__all__ = [
    "KS_CONST_1PCT",
    "KsResult",
    "MomentCheck",
    "MonotonicityReport",
    "ks_two_sample",
    "mc_moment_check",
    "quadratic_variation_diagnostic",
    "monotonicity_audit",
]

# asymptotic two-sample Kolmogorov-Smirnov constant at the 1% level
KS_CONST_1PCT = 1.628


@dataclass(frozen=True)
class KsResult:
    statistic: float
    n1: int
    n2: int
    critical_1pct: float
    passed: bool

    def to_dict(self):
        return {
            "statistic": self.statistic,
            "n1": self.n1,
            "n2": self.n2,
            "critical_1pct": self.critical_1pct,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class MomentCheck:
    passed: bool
    z: float
    mean: float
    stderr: float
    variance_ok: bool = True


@dataclass(frozen=True)
class MonotonicityReport:
    strict: bool
    min_increment: float
    flat_count: int


def ks_two_sample(a, b) -> KsResult:
    """Two-sample KS statistic with the asymptotic 1% critical value."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n1, n2 = len(a), len(b)
    if n1 < 30 or n2 < 30:
        raise ValueError("two-sample KS needs at least 30 draws per sample")
    d = float(_st.ks_2samp(a, b).statistic)
    crit = KS_CONST_1PCT * np.sqrt((n1 + n2) / (n1 * n2))
    return KsResult(statistic=d, n1=n1, n2=n2, critical_1pct=float(crit), passed=bool(d < crit))


def mc_moment_check(samples, target_mean, target_variance_bound=None) -> MomentCheck:
    """Pass iff the sample mean is within three standard errors of ``target_mean``.

    When ``target_variance_bound`` is given, ``variance_ok`` reports whether
    the sample variance stays below it; it does not enter ``passed``.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if len(x) < 100:
        raise ValueError("moment check needs at least 100 samples")
    mean = float(x.mean())
    se = float(np.sqrt(x.var(ddof=1) / len(x)))
    diff = mean - float(target_mean)
    if se == 0.0:
        z = 0.0 if diff == 0.0 else float(np.copysign(np.inf, diff))
    else:
        z = diff / se
    var_ok = True if target_variance_bound is None else bool(x.var(ddof=1) <= target_variance_bound)
    return MomentCheck(passed=bool(abs(diff) <= 3.0 * se), z=float(z), mean=mean, stderr=se,
                       variance_ok=var_ok)


def quadratic_variation_diagnostic(y: PathRecord) -> float:
    """``sum (dY)^2 / (4 sum Y dt)``; tends to 1 along a squared Bessel path."""
    vals = np.asarray(y.states, dtype=float)
    t = np.asarray(y.times, dtype=float)
    if vals.ndim != 1:
        raise ValueError("expected a scalar path")
    if np.any(vals < 0):
        raise ValueError("expected a nonnegative path")
    denom = 4.0 * np.sum(vals[:-1] * np.diff(t))
    if denom <= 0.0:
        raise ValueError("degenerate path: identically zero")
    return float(np.sum(np.diff(vals) ** 2) / denom)


def monotonicity_audit(tc: TimeChange) -> MonotonicityReport:
    inc = np.diff(np.asarray(tc.values, dtype=float))
    flat = int(np.sum(inc <= 0.0))
    return MonotonicityReport(strict=flat == 0, min_increment=float(inc.min()), flat_count=flat)
