"""
Dimension of the collision time set
===================================

Box-count the times a path spends within eps = sqrt(dt) of the walls.
The slope should sit near 1/2 - min k. The log-log plot is written to
collision_dim.svg.
"""
import numpy as np

from radial_dunkl import (
    MultiplicityFunction,
    SimulationConfig,
    build_root_system,
    default_start,
    estimate_zero_dim_ensemble,
    extract_collision_times,
    simulate_ensemble,
)
from radial_dunkl.io import loglog_svg

s = build_root_system("B", 2)
short = s.orbit_of(np.array([1.0, 0.0]))
ks = [0.45, 0.45]
ks[short] = 0.2
m = MultiplicityFunction(tuple(ks))
cfg = SimulationConfig(system=s, multiplicity=m, x0=default_start(s, 0.1), T=1.0, dt=1e-5,
                       path_count=16, seed=1)
zsets = [extract_collision_times(p, s, 1.0) for p in simulate_ensemble(cfg)]
est = estimate_zero_dim_ensemble(zsets)
print(f"B2, k = {ks}: slope {est.slope:.3f} (IQR {est.iqr:.3f}), expected {0.5 - min(ks):.2f}")
print(f"empty zero sets {est.empty_fraction:.2f}")

lo, hi = est.fit_window
xs = np.log(1 / est.scales[lo:hi])
ys = np.log(np.maximum(est.counts[lo:hi], 1))
with open("collision_dim.svg", "w") as f:
    f.write(loglog_svg(est.scales, est.counts, est.slope, ys.mean() - est.slope * xs.mean(), est.fit_window,
                       "B2 collision times", f"slope {est.slope:.3f}"))
