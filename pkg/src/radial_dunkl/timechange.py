"""
The random clock ``s(t) = int_0^t S(X(u)) du`` along a simulated path, its
inverse, and the time-changed squared alternating polynomial
``V(X(s^{-1}(t)))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraContext
from .sde import PathRecord

__all__ = [
    "TimeChange",
    "TimeChangeError",
    "density_along",
    "alternating_along",
    "compute_time_change",
    "invert_time_change",
    "time_changed_V",
]


class TimeChangeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TimeChange:
    """Cumulative clock values ``s_i = s(t_i)`` on a uniform grid of step ``dt``."""

    values: np.ndarray
    dt: float

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.dt

    @property
    def total(self) -> float:
        return float(self.values[-1])

    @property
    def strictly_increasing(self) -> bool:
        return bool(np.all(np.diff(self.values) > 0))


def density_along(states, ctx: AlgebraContext) -> np.ndarray:
    """Clock density ``S`` at every row of ``states`` (prefix/suffix product form)."""
    sq = (np.asarray(states, dtype=float) @ ctx.roots.T) ** 2
    m, p = sq.shape
    if p == 1:
        return np.full(m, ctx.squared_norms[0])
    ones = np.ones((m, 1))
    prefix = np.hstack([ones, np.cumprod(sq[:, :-1], axis=1)])
    suffix = np.hstack([np.cumprod(sq[:, :0:-1], axis=1)[:, ::-1], ones])
    return (prefix * suffix) @ ctx.squared_norms


def alternating_along(states, ctx: AlgebraContext) -> np.ndarray:
    return np.prod((np.asarray(states, dtype=float) @ ctx.roots.T) ** 2, axis=1)


def compute_time_change(path: PathRecord, ctx: AlgebraContext) -> TimeChange:
    """Trapezoidal cumulative integral of ``S`` along ``path``."""
    dens = density_along(path.states, ctx)
    dt = path.dt
    values = np.concatenate(([0.0], np.cumsum(0.5 * dt * (dens[1:] + dens[:-1]))))
    return TimeChange(values=values, dt=dt)


def invert_time_change(tc: TimeChange, target):
    """Real time at which the clock reaches ``target`` (scalar or array).

    Piecewise-linear inverse; raises if a target lies outside ``[0, s_M]``
    or falls in a flat stretch of the clock.
    """
    vals = tc.values
    tgt = np.asarray(target, dtype=float)
    scalar = tgt.ndim == 0
    tgt = np.atleast_1d(tgt)
    if np.any(tgt < 0.0) or np.any(tgt > vals[-1]):
        raise TimeChangeError(f"target outside [0, {vals[-1]:g}]")
    hi = np.clip(np.searchsorted(vals, tgt, side="left"), 1, len(vals) - 1)
    lo = hi - 1
    width = vals[hi] - vals[lo]
    if np.any(width <= 0.0):
        raise TimeChangeError("clock is flat on a bracketing interval")
    frac = (tgt - vals[lo]) / width
    out = (lo + frac) * tc.dt
    return float(out[0]) if scalar else out


def time_changed_V(path: PathRecord, ctx: AlgebraContext, tc: TimeChange, out_grid) -> PathRecord:
    """``V(X)`` read off at clock times ``out_grid``.

    ``V`` is evaluated on the path grid and interpolated linearly at the
    inverse clock times.
    """
    out_grid = np.asarray(out_grid, dtype=float)
    real_times = invert_time_change(tc, out_grid)
    v = alternating_along(path.states, ctx)
    values = np.interp(real_times, path.times, v)
    return PathRecord(
        times=out_grid,
        states=values,
        seed=path.seed,
        path_index=path.path_index,
        scheme="time-changed alternating polynomial",
    )
