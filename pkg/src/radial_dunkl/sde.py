"""
Euler-Maruyama integration of the radial Dunkl SDE

    dX = dB + sum_{a in R+} k(a) a / <a, X> dt

with dyadic adaptive substepping, chamber projection as the boundary policy,
and an optional shared-noise companion process used for comparison arguments.

Each macro step of length ``dt`` is refined depth-first: a substep of length
``h`` is halved while ``|drift(x)| h > theta * d(x)``, where ``d`` is the
distance to the nearest wall. The two halves of an increment ``dB`` are
``dB/2 +/- sqrt(h)/2 xi`` (Levy refinement), with ``xi`` read from the
refinement lane of the counter-based driver keyed by ``(step, depth, branch)``.
The macro increment is therefore the same at every refinement level, and any
two simulations that share a key see the same Brownian path.

At the maximal depth a step that still violates the bound is taken with the
wall products floored at ``r* = sqrt(sum(k) h / theta)``; below this floor the
drift bound cannot hold at any resolution. States closer than a tiny snap
distance to a simple wall are placed exactly on it, which records the contact.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .algebra import AlgebraContext, MultiplicityFunction
from .rng import _fill_normals, seed_word
from .roots import RootSystem

__all__ = [
    "IntegrationError",
    "SimulationConfig",
    "PathRecord",
    "default_start",
    "simulate_radial_dunkl",
    "simulate_ensemble",
    "couple_simple_root",
    "resolve_threads",
]

SNAP_REL = 1e-9


class IntegrationError(RuntimeError):
    """The integrator produced a non-finite state or an unresolvable step."""

    def __init__(self, message, path_index=None):
        super().__init__(message)
        self.path_index = path_index


def default_start(system: RootSystem, wall_distance: float = 1.0) -> np.ndarray:
    """Interior point at distance ``wall_distance`` from every simple wall.

    Minimum-norm solution of ``<g, x> / |g| = wall_distance`` over simple
    roots ``g``; the nearest wall of the chamber is then at that distance.
    """
    simple = system.simple_roots
    rhs = wall_distance * np.sqrt(np.einsum("ij,ij->i", simple, simple))
    x, *_ = np.linalg.lstsq(simple, rhs, rcond=None)
    return x


@dataclass(frozen=True, eq=False)
class SimulationConfig:
    """Inputs of one ensemble of radial Dunkl paths.

    ``x0`` defaults to :func:`default_start` (unit distance from every simple
    wall). ``max_substeps`` must be a power of two; it bounds the refinement
    of a single macro step.
    """

    system: RootSystem
    multiplicity: MultiplicityFunction
    x0: np.ndarray = None
    T: float = 1.0
    dt: float = 1e-3
    theta: float = 0.1
    max_substeps: int = 2**12
    seed: int = 0
    path_count: int = 1
    ctx: AlgebraContext = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ctx", AlgebraContext(self.system, self.multiplicity))
        x0 = default_start(self.system) if self.x0 is None else np.asarray(self.x0, dtype=float)
        if x0.shape != (self.system.ambient_dim,):
            raise ValueError(f"x0 must have length {self.system.ambient_dim}")
        if not np.all(np.isfinite(x0)):
            raise ValueError("x0 must be finite")
        d = (self.system.positive @ x0) / self.system.norms
        if np.any(d <= 0.0):
            raise ValueError("x0 must lie strictly inside the Weyl chamber")
        x0 = x0.copy()
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        if not (self.T > 0 and self.dt > 0 and self.dt < self.T):
            raise ValueError("need 0 < dt < T")
        if abs(self.n_steps * self.dt - self.T) > 1e-9 * self.T:
            raise ValueError("T must be an integer multiple of dt")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")
        m = int(self.max_substeps)
        if m < 1 or m & (m - 1):
            raise ValueError("max_substeps must be a power of two")
        if int(self.path_count) < 1:
            raise ValueError("path_count must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    @property
    def max_depth(self) -> int:
        return int(self.max_substeps).bit_length() - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    @property
    def snap_floor(self) -> float:
        return SNAP_REL * max(1.0, float(np.linalg.norm(self.x0)))


@dataclass(frozen=True, eq=False)
class PathRecord:
    """Uniform-grid realisation of one path.

    ``states`` has shape ``(M + 1, N)`` for chamber-valued paths and
    ``(M + 1,)`` for scalar processes. ``stats`` holds integrator counters.
    """

    times: np.ndarray
    states: np.ndarray
    seed: int = 0
    path_index: int = 0
    scheme: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def __len__(self):
        return len(self.times)


# counters: substeps, deepest level, floored steps, snaps, reflections
_N_COUNTERS = 5


@njit(cache=True, nogil=True)
def _integrate(pos, norms, k, simple, simple_sq, x0, dt, nsteps, theta, max_depth,
               seed, path, snap_floor, beta, z0, kz):
    p, n = pos.shape
    ns = simple.shape[0]
    states = np.empty((nsteps + 1, n))
    zs = np.empty(nsteps + 1)
    states[0] = x0
    zs[0] = z0
    x = x0.copy()
    z = z0
    couple = beta.shape[0] == n
    if couple:
        beta_norm = np.sqrt(np.sum(beta * beta))
    else:
        beta_norm = 1.0
    ksum = np.sum(k)
    cap = 4 * p * p
    stack_inc = np.empty((max_depth + 2, n))
    stack_depth = np.empty(max_depth + 2, np.int64)
    stack_branch = np.empty(max_depth + 2, np.uint64)
    inc = np.empty(n)
    xi = np.empty(n)
    drift = np.empty(n)
    prods = np.empty(p)
    counters = np.zeros(_N_COUNTERS, np.int64)
    status = 0
    sqrt_dt = np.sqrt(dt)
    for step in range(nsteps):
        ustep = np.uint64(step)
        _fill_normals(inc, seed, path, ustep, np.uint64(0), np.uint64(0))
        top = 0
        for c in range(n):
            stack_inc[0, c] = inc[c] * sqrt_dt
        stack_depth[0] = 0
        stack_branch[0] = np.uint64(0)
        while top >= 0:
            for c in range(n):
                inc[c] = stack_inc[top, c]
            depth = stack_depth[top]
            branch = stack_branch[top]
            top -= 1
            h = dt / (2.0 ** depth)

            dmin = np.inf
            for a in range(p):
                s = 0.0
                for c in range(n):
                    s += pos[a, c] * x[c]
                prods[a] = s
                da = s / norms[a]
                if da < dmin:
                    dmin = da
            viol_x = dmin <= 0.0
            if not viol_x:
                for c in range(n):
                    drift[c] = 0.0
                for a in range(p):
                    coef = k[a] / prods[a]
                    for c in range(n):
                        drift[c] += coef * pos[a, c]
                dn = 0.0
                for c in range(n):
                    dn += drift[c] * drift[c]
                viol_x = np.sqrt(dn) * h > theta * dmin
            viol_z = False
            if couple:
                viol_z = z <= 0.0 or kz * h > theta * z * z

            if (viol_x or viol_z) and depth < max_depth:
                _fill_normals(xi, seed, path, ustep, np.uint64(1 + depth), branch)
                half = 0.5 * np.sqrt(h)
                top += 1
                for c in range(n):
                    stack_inc[top, c] = 0.5 * inc[c] - half * xi[c]
                stack_depth[top] = depth + 1
                stack_branch[top] = np.uint64(2) * branch + np.uint64(1)
                top += 1
                for c in range(n):
                    stack_inc[top, c] = 0.5 * inc[c] + half * xi[c]
                stack_depth[top] = depth + 1
                stack_branch[top] = np.uint64(2) * branch
                continue

            counters[0] += 1
            if depth > counters[1]:
                counters[1] = depth
            rstar = np.sqrt(ksum * h / theta)
            if viol_x:
                if dmin > rstar * (1.0 + 1e-9):
                    status = 2
                    break
                counters[2] += 1
                for c in range(n):
                    drift[c] = 0.0
                for a in range(p):
                    coef = k[a] / max(prods[a], norms[a] * rstar)
                    for c in range(n):
                        drift[c] += coef * pos[a, c]
            if couple:
                zinc = 0.0
                for c in range(n):
                    zinc += inc[c] * beta[c]
                zinc /= beta_norm
                if viol_z:
                    zdrift = kz / max(z, rstar)
                else:
                    zdrift = kz / z
                z = abs(z + zdrift * h + zinc)
                if z < snap_floor:
                    z = 0.0

            for c in range(n):
                x[c] += drift[c] * h + inc[c]
            # reflect into the chamber through simple walls
            it = 0
            while True:
                worst = -1
                for g in range(ns):
                    s = 0.0
                    for c in range(n):
                        s += simple[g, c] * x[c]
                    if s < 0.0:
                        worst = g
                        break
                if worst < 0:
                    break
                it += 1
                counters[4] += 1
                if it > cap:
                    status = 3
                    break
                f = 2.0 * s / simple_sq[worst]
                for c in range(n):
                    x[c] -= f * simple[worst, c]
            if status:
                break
            for g in range(ns):
                s = 0.0
                for c in range(n):
                    s += simple[g, c] * x[c]
                if 0.0 < s < snap_floor * np.sqrt(simple_sq[g]):
                    f = s / simple_sq[g]
                    for c in range(n):
                        x[c] -= f * simple[g, c]
                    counters[3] += 1
            for c in range(n):
                if not np.isfinite(x[c]):
                    status = 1
            if not np.isfinite(z):
                status = 1
            if status:
                break
        if status:
            break
        states[step + 1] = x
        zs[step + 1] = z
    return states, zs, counters, status


_STATUS_MESSAGES = {
    1: "non-finite state",
    2: "maximal refinement reached while the wall distance is above the resolution floor",
    3: "chamber projection did not terminate",
}


def _run(cfg: SimulationConfig, path_index: int, beta=None):
    system = cfg.system
    simple = np.ascontiguousarray(system.simple_roots)
    simple_sq = np.einsum("ij,ij->i", simple, simple)
    if beta is None:
        beta_arr = np.zeros(0)
        z0 = 0.0
        kz = 0.0
    else:
        beta_arr = np.asarray(beta, dtype=float)
        z0 = float(beta_arr @ cfg.x0 / np.linalg.norm(beta_arr))
        kz = float(cfg.multiplicity.per_orbit[system.orbit_of(beta_arr)])
    states, zs, counters, status = _integrate(
        np.ascontiguousarray(system.positive),
        np.ascontiguousarray(system.norms),
        np.ascontiguousarray(cfg.ctx.k, dtype=float),
        simple,
        simple_sq,
        np.array(cfg.x0, dtype=float),
        float(cfg.dt),
        int(cfg.n_steps),
        float(cfg.theta),
        int(cfg.max_depth),
        seed_word(cfg.seed),
        seed_word(path_index),
        float(cfg.snap_floor),
        beta_arr,
        z0,
        kz,
    )
    if status:
        raise IntegrationError(
            f"path {path_index}: {_STATUS_MESSAGES[status]}", path_index=path_index
        )
    stats = {
        "substeps": int(counters[0]),
        "max_depth": int(counters[1]),
        "floored_steps": int(counters[2]),
        "snaps": int(counters[3]),
        "reflections": int(counters[4]),
    }
    return states, zs, stats


def simulate_radial_dunkl(cfg: SimulationConfig, path_index: int = 0) -> PathRecord:
    """Simulate one radial Dunkl path on the macro grid of ``cfg``."""
    states, _, stats = _run(cfg, path_index)
    return PathRecord(
        times=cfg.times,
        states=states,
        seed=int(cfg.seed),
        path_index=int(path_index),
        scheme="euler-maruyama/dyadic-adaptive/chamber-projection",
        stats=stats,
    )


def resolve_threads(threads: int = 0) -> int:
    if threads and threads > 0:
        return int(threads)
    env = os.environ.get("DUNKL_THREADS")
    if env:
        return max(1, int(env))
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)


def simulate_ensemble(cfg: SimulationConfig, path_indices=None, threads: int = 0) -> list:
    """Simulate several paths; the result is ordered by path index."""
    indices = list(range(cfg.path_count)) if path_indices is None else [int(i) for i in path_indices]
    workers = resolve_threads(threads)
    if workers == 1 or len(indices) == 1:
        return [simulate_radial_dunkl(cfg, i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: simulate_radial_dunkl(cfg, i), indices))


def couple_simple_root(cfg: SimulationConfig, beta, path_index: int = 0):
    """Simulate ``Y = <X, beta>/|beta|`` alongside a Bessel process on the same noise.

    The companion solves ``dZ = dB_beta + k(beta)/Z dt`` with
    ``B_beta = <B, beta>/|beta|`` and ``Z(0) = Y(0)``; it shares every
    refinement decision and refinement variate with ``X``.

    Returns
    -------
    (PathRecord, PathRecord)
        Scalar paths of ``Y`` and ``Z``.
    """
    beta = np.asarray(beta, dtype=float)
    simple = cfg.system.simple_roots
    if not np.any(np.all(np.abs(simple - beta) < 1e-10, axis=1)):
        raise ValueError("beta must be a simple root of the configured system")
    states, zs, stats = _run(cfg, path_index, beta=beta)
    y = states @ beta / np.linalg.norm(beta)
    common = dict(seed=int(cfg.seed), path_index=int(path_index), stats=stats)
    return (
        PathRecord(times=cfg.times, states=y, scheme="simple-root projection", **common),
        PathRecord(times=cfg.times, states=zs, scheme="coupled bessel", **common),
    )
