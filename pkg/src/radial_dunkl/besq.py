"""
Exact transition sampling of the classical squared Bessel process BESQ(delta).

Over a step ``h`` the transition is ``Y(t + h) = h Q`` with ``Q`` noncentral
chi-square of ``delta`` degrees of freedom and noncentrality ``Y(t)/h``; ``Q``
is drawn as a central chi-square with ``delta + 2K`` degrees of freedom,
``K ~ Poisson(Y(t) / (2h))``, and the chi-square as ``Gamma(dof/2, scale=2)``.
"""
import numpy as np
from numba import njit

from .sde import PathRecord

__all__ = ["simulate_besq_exact", "besq_terminal_samples", "path_seed32"]


def path_seed32(seed: int, path_index: int, lane: int = 0) -> int:
    """32-bit generator seed derived from ``(seed, path_index, lane)``."""
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), int(path_index), int(lane)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@njit(cache=True)
def _besq_path(delta, y0, steps, seed32):
    np.random.seed(seed32)
    out = np.empty(steps.shape[0] + 1)
    y = y0
    out[0] = y
    half_dof = 0.5 * delta
    for i in range(steps.shape[0]):
        h = steps[i]
        kk = np.random.poisson(y / (2.0 * h)) if y > 0.0 else 0
        y = h * np.random.gamma(half_dof + kk, 2.0)
        out[i + 1] = y
    return out


def simulate_besq_exact(delta: float, y0: float, grid, seed: int = 0, path_index: int = 0) -> PathRecord:
    """Sample ``BESQ(delta)`` from ``y0`` exactly on the time grid ``grid``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not y0 >= 0:
        raise ValueError("y0 must be nonnegative")
    grid = np.asarray(grid, dtype=float)
    steps = np.diff(grid)
    if grid.ndim != 1 or len(grid) < 2 or np.any(steps <= 0):
        raise ValueError("grid must be strictly increasing with at least two points")
    states = _besq_path(float(delta), float(y0), steps, path_seed32(seed, path_index))
    return PathRecord(
        times=grid,
        states=states,
        seed=int(seed),
        path_index=int(path_index),
        scheme=f"besq-exact(delta={delta:g})",
    )


def besq_terminal_samples(delta: float, y0: float, t: float, n: int, seed: int = 0) -> np.ndarray:
    """``n`` independent exact draws of ``BESQ(delta)`` at time ``t`` from ``y0``."""
    grid = np.array([0.0, float(t)])
    return np.array(
        [simulate_besq_exact(delta, y0, grid, seed, i).states[-1] for i in range(int(n))]
    )
