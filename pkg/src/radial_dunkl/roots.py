"""
Reduced root systems, positive and simple subsystems, and Weyl chamber geometry.

Roots are stored as rows of float arrays. A :class:`RootSystem` keeps the full
root set, the positive subsystem fixed by a chamber vector ``u``, the indices of
the simple roots inside the positive list, and the partition of the positive
roots into orbits of the reflection group.

Supported families are ``A``, ``B``, ``C``, ``D`` and the dihedral ``I2``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

__all__ = [
    "RootSystem",
    "RootSystemError",
    "RootCheck",
    "FAMILY_MINIMUM",
    "build_root_system",
    "default_chamber_vector",
    "verify_root_system",
    "positive_subsystem",
    "simple_system",
    "reflect",
    "orbit_partition",
    "chamber_project",
    "min_wall_distance",
    "wall_distances",
    "simple_coefficients",
]

FAMILY_MINIMUM = {"A": 2, "B": 2, "C": 2, "D": 3, "I2": 3}

MATCH_TOL = 1e-10
GENERIC_TOL = 1e-10


class RootSystemError(ValueError):
    """Raised for invalid root-system input or a non-generic chamber vector."""


@dataclass(frozen=True)
class RootCheck:
    """Outcome of :func:`verify_root_system`.

    ``kind`` is ``None`` when valid, otherwise ``"closure"`` or ``"reduced"``;
    ``pair`` holds the indices of the first offending pair in the input.
    """

    valid: bool
    kind: str | None = None
    pair: tuple[int, int] | None = None
    message: str = ""

    def __bool__(self):
        return self.valid


@dataclass(frozen=True, eq=False)
class RootSystem:
    """A reduced root system with a fixed positive subsystem.

    Attributes
    ----------
    family, size : str, int
        Construction parameters (``size`` is ``N`` for A-D and ``m`` for I2).
    roots : ndarray, shape (2P, N)
        The full root set, lexicographically sorted.
    positive : ndarray, shape (P, N)
        Positive roots, lexicographically sorted.
    simple : tuple of int
        Indices into ``positive`` of the simple roots.
    orbits : tuple of int
        Orbit id of each positive root.
    chamber_vector : ndarray, shape (N,)
        The vector ``u`` used to select ``positive``.
    """

    family: str
    size: int
    roots: np.ndarray
    positive: np.ndarray
    simple: tuple
    orbits: tuple
    chamber_vector: np.ndarray
    squared_norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        sq = np.einsum("ij,ij->i", self.positive, self.positive)
        object.__setattr__(self, "squared_norms", sq)
        for arr in (self.roots, self.positive, self.chamber_vector, sq):
            arr.setflags(write=False)

    @property
    def ambient_dim(self) -> int:
        return self.positive.shape[1]

    @property
    def n_positive(self) -> int:
        return self.positive.shape[0]

    @property
    def n_orbits(self) -> int:
        return max(self.orbits) + 1

    @property
    def simple_roots(self) -> np.ndarray:
        return self.positive[list(self.simple)]

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt(self.squared_norms)

    def orbit_members(self, orbit_id: int) -> list[int]:
        return [i for i, o in enumerate(self.orbits) if o == orbit_id]

    def orbit_of(self, root) -> int:
        """Orbit id of ``root`` (either sign)."""
        root = np.asarray(root, dtype=float)
        for sign in (1.0, -1.0):
            hit = np.flatnonzero(np.all(np.abs(self.positive - sign * root) < MATCH_TOL, axis=1))
            if hit.size:
                return self.orbits[hit[0]]
        raise RootSystemError(f"{root!r} is not a root of this system")

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "size": self.size,
            "ambient_dim": self.ambient_dim,
            "positive": self.positive.tolist(),
            "simple": list(self.simple),
            "orbits": list(self.orbits),
            "chamber_vector": self.chamber_vector.tolist(),
        }


def _lex_sort(vectors: np.ndarray) -> np.ndarray:
    # round so that trigonometric noise does not reorder ties
    keys = np.round(vectors, 12)
    order = np.lexsort(keys.T[::-1])
    return vectors[order]


def _unit(n, i):
    e = np.zeros(n)
    e[i] = 1.0
    return e


def _full_roots(family: str, size: int) -> np.ndarray:
    roots = []
    if family == "A":
        for i, j in itertools.permutations(range(size), 2):
            roots.append(_unit(size, j) - _unit(size, i))
    elif family in ("B", "C", "D"):
        for i, j in itertools.combinations(range(size), 2):
            for s, t in itertools.product((1.0, -1.0), repeat=2):
                roots.append(s * _unit(size, i) + t * _unit(size, j))
        if family != "D":
            scale = 1.0 if family == "B" else 2.0
            for i in range(size):
                roots.append(scale * _unit(size, i))
                roots.append(-scale * _unit(size, i))
    elif family == "I2":
        angles = np.pi * np.arange(2 * size) / size
        roots = list(np.column_stack([np.cos(angles), np.sin(angles)]))
    else:
        raise RootSystemError(f"unknown family {family!r}")
    return np.array(roots, dtype=float)


def default_chamber_vector(n: int) -> np.ndarray:
    """Deterministic chamber vector with ``u_i = sum_{j <= i} pi**(j-1)``."""
    return np.cumsum(np.pi ** np.arange(n))


def _is_generic(roots, u):
    prods = np.abs(roots @ u)
    bound = GENERIC_TOL * np.linalg.norm(roots, axis=1) * np.linalg.norm(u)
    return bool(np.all(prods > bound))


def build_root_system(family: str, size: int, chamber_vector=None) -> RootSystem:
    """Build a standard reduced root system.

    Parameters
    ----------
    family : {"A", "B", "C", "D", "I2"}
    size : int
        Ambient dimension ``N`` for A-D (roots ``e_j - e_i`` for A live in
        ``R^N``), or ``m`` for the dihedral system ``I2(m)``.
    chamber_vector : array_like, optional
        Vector ``u`` selecting the positive roots. Defaults to
        :func:`default_chamber_vector`, perturbed deterministically if it is
        orthogonal to some root.
    """
    family = str(family).upper()
    if family not in FAMILY_MINIMUM:
        raise RootSystemError(f"unknown family {family!r}")
    size = int(size)
    if size < FAMILY_MINIMUM[family]:
        raise RootSystemError(
            f"family {family} needs size >= {FAMILY_MINIMUM[family]}, got {size}"
        )
    roots = _lex_sort(_full_roots(family, size))
    n = roots.shape[1]
    if chamber_vector is None:
        u = default_chamber_vector(n)
        for attempt in range(8):
            if _is_generic(roots, u):
                break
            u = u + 1e-3 * np.arange(1, n + 1)
        else:
            raise RootSystemError("could not find a generic default chamber vector")
    else:
        u = np.asarray(chamber_vector, dtype=float)
        if u.shape != (n,):
            raise RootSystemError(f"chamber vector must have length {n}")
    positive = positive_subsystem(roots, u)
    simple = simple_system(positive)
    simple_idx = tuple(_index_of(positive, s) for s in simple)
    system = RootSystem(
        family=family,
        size=size,
        roots=roots,
        positive=positive,
        simple=simple_idx,
        orbits=(0,) * len(positive),
        chamber_vector=u.copy(),
    )
    return RootSystem(
        family=family,
        size=size,
        roots=roots,
        positive=positive,
        simple=simple_idx,
        orbits=tuple(orbit_partition(system)),
        chamber_vector=u.copy(),
    )


def _index_of(vectors, v, tol=MATCH_TOL):
    hit = np.flatnonzero(np.all(np.abs(vectors - v) < tol, axis=1))
    return int(hit[0]) if hit.size else -1


def reflect(y, x) -> np.ndarray:
    """Reflect ``y`` (a vector or rows of vectors) across the hyperplane orthogonal to ``x``."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    xx = x @ x
    if xx == 0.0:
        raise RootSystemError("cannot reflect across the zero vector")
    return y - 2.0 * np.multiply.outer((y @ x) / xx, x)


def verify_root_system(candidate) -> RootCheck:
    """Check closure under reflections and reducedness of a finite vector set."""
    vecs = np.asarray(candidate, dtype=float)
    if vecs.ndim != 2 or vecs.shape[0] == 0:
        raise RootSystemError("candidate must be a nonempty list of equal-length vectors")
    sq = np.einsum("ij,ij->i", vecs, vecs)
    if np.any(sq == 0.0):
        raise RootSystemError("zero vector in candidate set")
    for i, j in itertools.product(range(len(vecs)), repeat=2):
        if i == j:
            continue
        a, b = vecs[i], vecs[j]
        # b parallel to a with |c| != 1 breaks reducedness
        cos = (a @ b) / np.sqrt(sq[i] * sq[j])
        if abs(abs(cos) - 1.0) < 1e-12:
            c = (a @ b) / sq[i]
            if abs(abs(c) - 1.0) > MATCH_TOL:
                return RootCheck(False, "reduced", (i, j), f"vector {j} = {c:g} * vector {i}")
    for i, j in itertools.product(range(len(vecs)), repeat=2):
        image = reflect(vecs[j], vecs[i])
        if _index_of(vecs, image) < 0:
            return RootCheck(
                False, "closure", (i, j), f"reflection of vector {j} by vector {i} is not in the set"
            )
    return RootCheck(True)


def positive_subsystem(roots, u) -> np.ndarray:
    """Roots with ``<alpha, u> > 0``, in lexicographic order."""
    roots = np.asarray(roots, dtype=float)
    u = np.asarray(u, dtype=float)
    if not _is_generic(roots, u):
        raise RootSystemError("chamber vector is orthogonal to a root")
    return _lex_sort(roots[roots @ u > 0])


def simple_system(positive) -> np.ndarray:
    """Simple roots: the extreme rays of the cone spanned by ``positive``.

    A positive root is simple iff it is not a nonnegative combination of the
    other positive roots. Output keeps the order of ``positive``.
    """
    positive = np.asarray(positive, dtype=float)
    if len(positive) == 1:
        return positive.copy()
    keep = []
    for i, alpha in enumerate(positive):
        others = np.delete(positive, i, axis=0)
        _, resid = nnls(others.T, alpha)
        if resid > 1e-9 * np.linalg.norm(alpha):
            keep.append(i)
    simple = positive[keep]
    gram = simple @ simple.T
    off = gram[~np.eye(len(simple), dtype=bool)]
    if np.any(off > 1e-10):
        raise RootSystemError("input is not a positive subsystem: simple roots not obtuse")
    return simple


def simple_coefficients(system: RootSystem) -> np.ndarray:
    """Coefficients ``c`` with ``positive = c @ simple_roots`` (shape (P, |simple|))."""
    coeffs, *_ = np.linalg.lstsq(system.simple_roots.T, system.positive.T, rcond=None)
    return coeffs.T


def orbit_partition(system: RootSystem) -> list[int]:
    """Orbit id per positive root under the reflection group.

    Orbits are found by breadth-first closure under reflections by all roots,
    folding negative images back to positive ones. Ids are assigned in order
    of each orbit's lexicographically smallest member so that the result does
    not depend on input ordering.
    """
    pos = system.positive
    p = len(pos)
    label = [-1] * p
    classes = []
    for start in range(p):
        if label[start] >= 0:
            continue
        members = {start}
        frontier = [start]
        label[start] = len(classes)
        while frontier:
            nxt = []
            for idx in frontier:
                images = pos[idx] - (2.0 * (pos @ pos[idx]) / system.squared_norms)[:, None] * pos
                for img in images:
                    j = _index_of(pos, img)
                    if j < 0:
                        j = _index_of(pos, -img)
                    if j < 0:
                        raise RootSystemError("positive set is not closed under reflections")
                    if label[j] < 0:
                        label[j] = label[start]
                        members.add(j)
                        nxt.append(j)
            frontier = nxt
        classes.append(members)
    order = sorted(range(len(classes)), key=lambda c: min(tuple(np.round(pos[m], 12)) for m in classes[c]))
    relabel = {old: new for new, old in enumerate(order)}
    return [relabel[l] for l in label]


def chamber_project(x, system: RootSystem) -> np.ndarray:
    """Map ``x`` into the closed Weyl chamber by reflections in simple walls."""
    x = np.array(x, dtype=float)
    simple = system.simple_roots
    sq = system.squared_norms[list(system.simple)]
    cap = len(system.roots) ** 2
    for _ in range(cap + 1):
        prods = simple @ x
        neg = np.flatnonzero(prods < 0.0)
        if neg.size == 0:
            return x
        g = neg[0]
        x = x - 2.0 * prods[g] / sq[g] * simple[g]
    raise RootSystemError("chamber projection did not terminate")


def wall_distances(states, system: RootSystem) -> np.ndarray:
    """Signed distance of each state to each positive-root wall, shape (..., P)."""
    states = np.asarray(states, dtype=float)
    return (states @ system.positive.T) / system.norms


def min_wall_distance(x, system: RootSystem, tol: float = 1e-10) -> float:
    """Distance from ``x`` (in the closed chamber) to the chamber boundary."""
    x = np.asarray(x, dtype=float)
    d = wall_distances(x, system)
    if np.any(d < -tol * max(1.0, float(np.linalg.norm(x)))):
        raise RootSystemError("point lies outside the Weyl chamber")
    return max(float(d.min()), 0.0)
