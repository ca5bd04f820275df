"""
Root systems and Weyl chambers
==============================

Build a few root systems, list their positive and simple roots, and fold
random points into the fundamental chamber.
"""
import numpy as np

from radial_dunkl import build_root_system, chamber_project, min_wall_distance, verify_root_system

for family, size in [("A", 3), ("B", 2), ("D", 4), ("I2", 5)]:
    s = build_root_system(family, size)
    print(f"{family}{size}: {s.n_positive} positive roots, {len(s.simple)} simple, {s.n_orbits} orbit(s)")

# B2 has a short and a long orbit; orbit ids are what multiplicities are keyed by
b2 = build_root_system("B", 2)
for i, a in enumerate(b2.positive):
    print("  ", a, "orbit", b2.orbits[i])
print("short roots live in orbit", b2.orbit_of(np.array([1.0, 0.0])))

# a bad input is named, not silently accepted
check = verify_root_system(np.array([[1.0, 0.0], [-1.0, 0.0], [2.0, 0.0], [-2.0, 0.0]]))
print("non-reduced input:", check.valid, check.kind)

# folding into the closed chamber
rng = np.random.default_rng(0)
a3 = build_root_system("A", 3)
for _ in range(3):
    x = rng.standard_normal(3)
    y = chamber_project(x, a3)
    print(np.round(x, 3), "->", np.round(y, 3), "wall distance", round(min_wall_distance(y, a3), 3))
