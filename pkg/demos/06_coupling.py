"""
Comparison with a one-dimensional Bessel process
================================================

Drive the projection Y = <X, b>/|b| on a simple root and a reflected
Bessel process Z with the same noise. Y never exceeds Z beyond the
discretisation error.
"""
import numpy as np

from radial_dunkl import MultiplicityFunction, SimulationConfig, build_root_system, couple_simple_root

s = build_root_system("I2", 4)
cfg = SimulationConfig(system=s, multiplicity=MultiplicityFunction((0.25, 0.4)), T=1.0, dt=1e-5, seed=7)
for j, beta in enumerate(s.simple_roots):
    excess = []
    for i in range(10):
        y, z = couple_simple_root(cfg, beta, i)
        excess.append((y.states - z.states).max() / max(1.0, z.states.max()))
    print(f"simple root {j} {np.round(beta, 3)}: worst Y - Z = {max(excess):.2e}")
