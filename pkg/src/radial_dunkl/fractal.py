"""
Collision-time sets and their box-counting dimension.

A grid time belongs to the collision set when the state is within
``epsilon = epsilon_coeff * sqrt(dt)`` of the chamber boundary. The set is
covered by boxes ``[m delta, (m + 1) delta)`` on dyadic scales and the
dimension is the least-squares slope of ``log N(delta)`` against
``log(1/delta)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .roots import RootSystem, wall_distances
from .sde import PathRecord

__all__ = [
    "ZeroSet",
    "DimEstimate",
    "EnsembleDimEstimate",
    "EstimatorError",
    "extract_collision_times",
    "extract_zero_times",
    "dyadic_scales",
    "default_window",
    "box_counts",
    "fit_dimension",
    "estimate_zero_dim_ensemble",
    "cantor_zero_set",
    "calibration_set",
]


class EstimatorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ZeroSet:
    hit_times: np.ndarray
    epsilon: float
    dt: float
    T: float

    def __len__(self):
        return len(self.hit_times)

    @property
    def empty(self) -> bool:
        return len(self.hit_times) == 0


@dataclass(frozen=True, eq=False)
class DimEstimate:
    scales: np.ndarray
    counts: np.ndarray
    slope: float
    stderr: float
    fit_window: tuple

    def to_dict(self) -> dict:
        return {
            "scales": [float(s) for s in self.scales],
            "counts": [int(c) for c in self.counts],
            "slope": float(self.slope),
            "stderr": float(self.stderr),
            "window": [int(i) for i in self.fit_window],
        }


@dataclass(frozen=True, eq=False)
class EnsembleDimEstimate:
    """Median of per-path slopes over the paths with a nonempty zero set."""

    slope: float
    iqr: float
    empty_fraction: float
    per_path: tuple
    scales: np.ndarray
    counts: np.ndarray
    stderr: float
    fit_window: tuple

    def to_dict(self) -> dict:
        return {
            "scales": [float(s) for s in self.scales],
            "counts": [float(c) for c in self.counts],
            "slope": float(self.slope),
            "stderr": float(self.stderr),
            "window": [int(i) for i in self.fit_window],
            "iqr": float(self.iqr),
            "empty_fraction": float(self.empty_fraction),
            "per_path": [None if s is None else float(s) for s in self.per_path],
        }


def extract_zero_times(times, distance, epsilon: float) -> ZeroSet:
    """Grid times where ``distance <= epsilon``."""
    times = np.asarray(times, dtype=float)
    distance = np.asarray(distance, dtype=float)
    dt = float(times[1] - times[0])
    return ZeroSet(
        hit_times=times[distance <= epsilon], epsilon=float(epsilon), dt=dt, T=float(times[-1])
    )


def extract_collision_times(path: PathRecord, system: RootSystem, epsilon_coeff: float = 1.0) -> ZeroSet:
    """Times at which a chamber-valued path is within ``epsilon_coeff sqrt(dt)`` of a wall."""
    eps = float(epsilon_coeff) * np.sqrt(path.dt)
    dist = wall_distances(path.states, system).min(axis=1)
    zs = extract_zero_times(path.times, dist, eps)
    if eps == 0.0:
        return ZeroSet(path.times[dist <= 0.0], 0.0, zs.dt, zs.T)
    return zs


def dyadic_scales(T: float, dt: float) -> np.ndarray:
    """Scales ``T / 2**j`` for ``j = 0, 1, ...`` down to the grid spacing."""
    jmax = int(np.floor(np.log2(T / dt) + 1e-9))
    return T / 2.0 ** np.arange(jmax + 1)


def default_window(scales, dt: float, T: float) -> tuple:
    """Index range of scales in ``[16 dt, T/16]`` (half-open)."""
    scales = np.asarray(scales)
    ok = np.flatnonzero((scales >= 16 * dt * (1 - 1e-12)) & (scales <= T / 16 * (1 + 1e-12)))
    if ok.size == 0:
        raise EstimatorError("no scales inside the default fit window")
    return int(ok[0]), int(ok[-1]) + 1


def box_counts(zs: ZeroSet, scales) -> np.ndarray:
    """Number of boxes ``[m delta, (m + 1) delta)`` that contain a hit time.

    The final box is closed on the right so that a set filling ``[0, T]``
    gives ``N(delta) = T / delta``.
    """
    scales = np.asarray(scales, dtype=float)
    if np.any(scales < zs.dt * (1 - 1e-9)):
        raise EstimatorError("scale below grid resolution")
    t = zs.hit_times
    counts = np.empty(len(scales), dtype=np.int64)
    for i, delta in enumerate(scales):
        # nudge against floor() rounding of grid points lying on box edges
        boxes = np.floor(t / delta + 1e-9)
        # the horizon T itself belongs to the last box
        last = np.ceil(zs.T / delta - 1e-9) - 1
        counts[i] = np.unique(np.minimum(boxes, last)).size
    return counts


def fit_dimension(counts, scales, fit_window=None, dt=None, T=None) -> DimEstimate:
    """Least-squares slope of ``log N`` against ``log(1/delta)``.

    ``fit_window`` is a half-open index range into ``scales``; when omitted
    it defaults to the scales in ``[16 dt, T/16]`` (``dt`` and ``T`` then
    required).
    """
    counts = np.asarray(counts, dtype=float)
    scales = np.asarray(scales, dtype=float)
    if fit_window is None:
        if dt is None or T is None:
            raise EstimatorError("default window needs dt and T")
        fit_window = default_window(scales, dt, T)
    lo, hi = fit_window
    if hi - lo < 4:
        raise EstimatorError("need at least 4 scales in the fit window")
    c = counts[lo:hi]
    if np.any(c < 1):
        raise EstimatorError("zero box count inside the fit window")
    xs = np.log(1.0 / scales[lo:hi])
    ys = np.log(c)
    A = np.column_stack([xs, np.ones_like(xs)])
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = ys - A @ coef
    n = len(xs)
    sxx = np.sum((xs - xs.mean()) ** 2)
    stderr = float(np.sqrt(resid @ resid / (n - 2) / sxx)) if n > 2 else 0.0
    return DimEstimate(
        scales=scales, counts=counts.astype(np.int64), slope=float(coef[0]), stderr=stderr,
        fit_window=(lo, hi),
    )


def estimate_zero_dim_ensemble(zero_sets, scales=None, fit_window=None) -> EnsembleDimEstimate:
    """Median box-counting slope over an ensemble of zero sets on a shared grid.

    Paths whose zero set is empty are skipped and reported through
    ``empty_fraction``; the spread is the interquartile range of the
    per-path slopes.
    """
    zero_sets = list(zero_sets)
    if len(zero_sets) < 8:
        raise EstimatorError("need at least 8 paths")
    dt, T = zero_sets[0].dt, zero_sets[0].T
    if any(abs(z.dt - dt) > 1e-12 * dt or abs(z.T - T) > 1e-9 * T for z in zero_sets):
        raise EstimatorError("paths do not share a grid")
    if scales is None:
        scales = dyadic_scales(T, dt)
    scales = np.asarray(scales, dtype=float)
    if fit_window is None:
        fit_window = default_window(scales, dt, T)
    nonempty = [z for z in zero_sets if not z.empty]
    empty_fraction = 1.0 - len(nonempty) / len(zero_sets)
    if not nonempty:
        raise EstimatorError(
            f"all {len(zero_sets)} zero sets are empty (no-collision regime or dt too coarse)"
        )
    per_path = []
    all_counts = []
    for z in zero_sets:
        if z.empty:
            per_path.append(None)
            continue
        counts = box_counts(z, scales)
        all_counts.append(counts)
        per_path.append(fit_dimension(counts, scales, fit_window).slope)
    slopes = np.array([s for s in per_path if s is not None])
    q1, med, q3 = np.percentile(slopes, [25, 50, 75])
    mean_counts = np.mean(all_counts, axis=0)
    se = 1.2533 * slopes.std(ddof=1) / np.sqrt(len(slopes)) if len(slopes) > 1 else 0.0
    return EnsembleDimEstimate(
        slope=float(med),
        iqr=float(q3 - q1),
        empty_fraction=float(empty_fraction),
        per_path=tuple(per_path),
        scales=scales,
        counts=mean_counts,
        stderr=float(se),
        fit_window=tuple(fit_window),
    )


def cantor_zero_set(depth: int, base: int = 3, keep=(0, 2)) -> ZeroSet:
    """Left endpoints of the depth-``depth`` Cantor construction on ``[0, 1)``.

    The grid has spacing ``base**-depth``; ``keep`` lists the retained
    sub-intervals at each level (``(0, 2)`` is the middle-thirds set,
    ``base=4, keep=(0, 3)`` the middle-half set).
    """
    idx = np.zeros(1, dtype=np.int64)
    for _ in range(depth):
        idx = (idx[:, None] * base + np.asarray(keep)[None, :]).ravel()
    dt = float(base) ** -depth
    return ZeroSet(hit_times=np.sort(idx) * dt, epsilon=0.0, dt=dt, T=1.0)


def calibration_set(mode: str, depth: int = 12, dyadic_level: int = 16):
    """Synthetic set with a known dimension for estimator calibration.

    Returns ``(zero_set, scales, fit_window, target)``. ``interval`` and
    ``point`` live on a grid of spacing ``2**-dyadic_level`` with dyadic
    scales and the default window; the Cantor sets use their own scales
    ``base**-j`` and fit over ``j = 1 .. depth - 1``.
    """
    if mode in ("interval", "point"):
        dt = 2.0**-dyadic_level
        grid = np.arange(2**dyadic_level + 1) * dt
        dist = np.zeros_like(grid) if mode == "interval" else np.where(grid == 0.5, 0.0, 1.0)
        zs = extract_zero_times(grid, dist, 0.0)
        scales = dyadic_scales(1.0, dt)
        return zs, scales, default_window(scales, dt, 1.0), 1.0 if mode == "interval" else 0.0
    if mode == "cantor3":
        base, keep = 3, (0, 2)
    elif mode == "cantor4":
        base, keep = 4, (0, 3)
    else:
        raise ValueError(f"unknown calibration set {mode!r}")
    zs = cantor_zero_set(depth, base, keep)
    scales = float(base) ** -np.arange(depth + 1)
    return zs, scales, (1, depth), np.log(2) / np.log(base)
