"""
Counter-based Gaussian driver.

Every normal variate is a pure function of a key tuple
``(seed, path, step, lane, branch, component)``: the words are folded one by
one through the SplitMix64 finalizer and two such hashes feed a Box-Muller
transform. Nothing is stateful, so any increment can be regenerated in any
order, by any worker.

Lane 0 carries the macro-step Brownian increments. Lane ``1 + d`` carries the
refinement variates used when a step at depth ``d`` is split in two.
"""
import numpy as np
from numba import njit

__all__ = ["gaussian_driver", "gaussian_block", "normal_at", "seed_word"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0
_TWO_PI = 2.0 * np.pi


def seed_word(value) -> np.uint64:
    """Reduce an arbitrary Python integer to a 64-bit key word."""
    return np.uint64(int(value) & 0xFFFFFFFFFFFFFFFF)


@njit(cache=True)
def _mix(z):
    z = z + _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def _key(seed, path, step, lane, branch):
    h = _mix(seed)
    h = _mix(h ^ path)
    h = _mix(h ^ step)
    h = _mix(h ^ lane)
    return _mix(h ^ branch)


@njit(cache=True)
def _normal_from_key(key, comp):
    c = np.uint64(2) * comp
    a = _mix(key ^ c)
    b = _mix(key ^ (c + np.uint64(1)))
    # 53-bit uniforms; u1 in (0, 1] keeps the log finite
    u1 = (np.float64(a >> _S11) + 1.0) * _INV53
    u2 = np.float64(b >> _S11) * _INV53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)


@njit(cache=True)
def normal_at(seed, path, step, lane, branch, comp):
    """Single standard normal for a full key (all arguments ``uint64``)."""
    return _normal_from_key(_key(seed, path, step, lane, branch), comp)


@njit(cache=True)
def _fill_normals(out, seed, path, step, lane, branch):
    key = _key(seed, path, step, lane, branch)
    for c in range(out.shape[0]):
        out[c] = _normal_from_key(key, np.uint64(c))


@njit(cache=True)
def _block(seed, path, step0, nsteps, dim):
    out = np.empty((nsteps, dim))
    for i in range(nsteps):
        key = _key(seed, path, step0 + np.uint64(i), np.uint64(0), np.uint64(0))
        for c in range(dim):
            out[i, c] = _normal_from_key(key, np.uint64(c))
    return out


def gaussian_driver(seed: int, path_index: int, step: int, dim: int) -> np.ndarray:
    """Standard normal vector of length ``dim`` for one macro step of one path."""
    out = np.empty(int(dim))
    _fill_normals(
        out, seed_word(seed), seed_word(path_index), seed_word(step), np.uint64(0), np.uint64(0)
    )
    return out


def gaussian_block(seed: int, path_index: int, step0: int, nsteps: int, dim: int) -> np.ndarray:
    """Macro-step normals for ``nsteps`` consecutive steps, shape ``(nsteps, dim)``."""
    return _block(
        seed_word(seed), seed_word(path_index), seed_word(step0), np.int64(nsteps), np.int64(dim)
    )
