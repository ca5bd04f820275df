"""
The alternating polynomial and its Laplacian
============================================

V = prod <a, x>^2 over positive roots, S its clock density. The cross
terms in the drift cancel for orbit-invariant multiplicities, and the
Laplacian of V is 2S. Both are checked at random chamber points.
"""
import numpy as np

from radial_dunkl import (
    AlgebraContext,
    MultiplicityFunction,
    alternating_poly_sq,
    build_root_system,
    chamber_project,
    cross_term_sum,
    time_change_density,
)
from radial_dunkl.verify import laplacian_oracle

s = build_root_system("B", 3)
ctx = AlgebraContext(s, MultiplicityFunction((0.2, 0.45)))
rng = np.random.default_rng(1)

for _ in range(4):
    x = chamber_project(rng.standard_normal(3), s)
    val, scale = cross_term_sum(ctx, x, with_scale=True)
    lap = laplacian_oracle(ctx, x)
    S = time_change_density(ctx, x)
    print(f"V = {alternating_poly_sq(ctx, x):.4e}  cross/scale = {abs(val) / scale:.1e}  "
          f"lap V / 2S - 1 = {lap / (2 * S) - 1:.1e}")
