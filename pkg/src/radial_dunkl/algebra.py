"""
Polynomial identities attached to a root system with a multiplicity function.

All functions take an :class:`AlgebraContext`, which pairs a
:class:`~radial_dunkl.roots.RootSystem` with a :class:`MultiplicityFunction`
and caches per-root arrays.

Notation: ``P`` positive roots, ``<a, x>`` the canonical inner product,
``V(x) = prod <a, x>**2`` the squared alternating polynomial and
``S(x) = sum_a |a|**2 prod_{b != a} <b, x>**2`` the density of the random clock.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .roots import RootSystem

__all__ = [
    "MultiplicityFunction",
    "AlgebraContext",
    "WallProximityError",
    "weight",
    "alternating_poly_sq",
    "grad_alternating_poly_sq",
    "laplacian_alternating_poly_sq",
    "time_change_density",
    "cross_term_sum",
    "drift",
]

WALL_TOL = 1e-14
INTERIOR_TOL = 1e-8


class WallProximityError(ValueError):
    """Raised when a singular quantity is evaluated too close to a wall."""

    def __init__(self, message, root_index=None):
        super().__init__(message)
        self.root_index = root_index


@dataclass(frozen=True)
class MultiplicityFunction:
    """Positive multiplicity per orbit id (``per_orbit[i]`` is ``k`` on orbit ``i``)."""

    per_orbit: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.per_orbit)
        if not vals:
            raise ValueError("multiplicity needs at least one orbit value")
        if any(not np.isfinite(v) or v <= 0.0 for v in vals):
            raise ValueError(f"multiplicities must be finite and > 0, got {vals}")
        object.__setattr__(self, "per_orbit", vals)

    @classmethod
    def uniform(cls, system: RootSystem, k: float) -> "MultiplicityFunction":
        return cls((k,) * system.n_orbits)

    @property
    def minimum(self) -> float:
        return min(self.per_orbit)


@dataclass(frozen=True, eq=False)
class AlgebraContext:
    system: RootSystem
    multiplicity: MultiplicityFunction
    k: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.multiplicity.per_orbit) != self.system.n_orbits:
            raise ValueError(
                f"system has {self.system.n_orbits} orbits, "
                f"multiplicity gives {len(self.multiplicity.per_orbit)} values"
            )
        k = np.array([self.multiplicity.per_orbit[o] for o in self.system.orbits])
        k.setflags(write=False)
        object.__setattr__(self, "k", k)

    @property
    def roots(self) -> np.ndarray:
        return self.system.positive

    @property
    def squared_norms(self) -> np.ndarray:
        return self.system.squared_norms


def _products(ctx, x):
    return ctx.roots @ np.asarray(x, dtype=float)


def _check_interior(d, ctx, tol):
    scaled = d / np.sqrt(ctx.squared_norms)
    i = int(np.argmin(np.abs(scaled)))
    if abs(scaled[i]) < tol:
        raise WallProximityError(f"point within {tol:g} of the wall of root {i}", root_index=i)


def weight(ctx: AlgebraContext, x) -> float:
    """Weight function ``prod <a, x>**(2 k(a))`` on the closed chamber."""
    d = _products(ctx, x)
    if np.any(d < -1e-12 * max(1.0, np.linalg.norm(x))):
        raise ValueError("weight is only defined on the closed Weyl chamber")
    return float(np.prod(np.maximum(d, 0.0) ** (2.0 * ctx.k)))


def alternating_poly_sq(ctx: AlgebraContext, x) -> float:
    return float(np.prod(_products(ctx, x) ** 2))


def grad_alternating_poly_sq(ctx: AlgebraContext, x) -> np.ndarray:
    """Gradient ``2 V(x) sum_a a / <a, x>``; raises on a wall."""
    d = _products(ctx, x)
    _check_interior(d, ctx, WALL_TOL)
    return 2.0 * np.prod(d**2) * ((1.0 / d) @ ctx.roots)


def laplacian_alternating_poly_sq(ctx: AlgebraContext, x) -> float:
    """Closed-form Laplacian of ``V`` from the full second-derivative expansion.

    Keeps the cross terms, so it does not rely on their cancellation.
    """
    d = _products(ctx, x)
    _check_interior(d, ctx, WALL_TOL)
    v = np.prod(d**2)
    g = (1.0 / d) @ ctx.roots
    return float(4.0 * v * (g @ g) - 2.0 * v * np.sum(ctx.squared_norms / d**2))


def time_change_density(ctx: AlgebraContext, x) -> float:
    """``S(x) = sum_a |a|^2 prod_{b != a} <b, x>^2``, finite on the walls."""
    sq = _products(ctx, x) ** 2
    p = len(sq)
    if p == 1:
        return float(ctx.squared_norms[0])
    # prefix/suffix products give prod over b != a without division
    prefix = np.concatenate(([1.0], np.cumprod(sq[:-1])))
    suffix = np.concatenate((np.cumprod(sq[::-1][:-1])[::-1], [1.0]))
    return float(np.sum(ctx.squared_norms * prefix * suffix))


def cross_term_sum(ctx: AlgebraContext, x, with_scale: bool = False):
    """Residual ``sum_{a != b} k(b) <a, b> / (<a, x> <b, x>)``.

    Vanishes for every orbit-invariant multiplicity; the returned value is a
    numerical probe. With ``with_scale=True`` also returns the largest
    absolute term, for relative comparisons.
    """
    d = _products(ctx, x)
    _check_interior(d, ctx, INTERIOR_TOL)
    gram = ctx.roots @ ctx.roots.T
    terms = gram * ctx.k[None, :] / np.outer(d, d)
    np.fill_diagonal(terms, 0.0)
    total = float(terms.sum())
    if with_scale:
        return total, float(np.abs(terms).max()) if terms.size > 1 else 0.0
    return total


def drift(ctx: AlgebraContext, x) -> np.ndarray:
    """Drift field ``sum_a k(a) a / <a, x>`` of the radial process."""
    d = _products(ctx, x)
    _check_interior(d, ctx, WALL_TOL)
    return (ctx.k / d) @ ctx.roots
