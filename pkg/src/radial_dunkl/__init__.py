"""
Radial Dunkl (multivariate Bessel) processes on reduced root systems:
root-system geometry, the algebra of the squared alternating polynomial,
an adaptive Euler-Maruyama engine with chamber projection, exact squared
Bessel sampling, the random time change, and box-counting estimates of the
dimension of collision times.
"""
from .algebra import (
    AlgebraContext,
    MultiplicityFunction,
    WallProximityError,
    alternating_poly_sq,
    cross_term_sum,
    drift,
    grad_alternating_poly_sq,
    laplacian_alternating_poly_sq,
    time_change_density,
    weight,
)
from .besq import besq_terminal_samples, simulate_besq_exact
from .fractal import (
    DimEstimate,
    EnsembleDimEstimate,
    EstimatorError,
    ZeroSet,
    box_counts,
    cantor_zero_set,
    dyadic_scales,
    estimate_zero_dim_ensemble,
    extract_collision_times,
    extract_zero_times,
    fit_dimension,
)
from .rng import gaussian_block, gaussian_driver
from .roots import (
    RootCheck,
    RootSystem,
    RootSystemError,
    build_root_system,
    chamber_project,
    min_wall_distance,
    orbit_partition,
    positive_subsystem,
    reflect,
    simple_system,
    verify_root_system,
    wall_distances,
)
from .sde import (
    IntegrationError,
    PathRecord,
    SimulationConfig,
    couple_simple_root,
    default_start,
    simulate_ensemble,
    simulate_radial_dunkl,
)
from .stats import (
    KsResult,
    MomentCheck,
    MonotonicityReport,
    ks_two_sample,
    mc_moment_check,
    monotonicity_audit,
    quadratic_variation_diagnostic,
)
from .timechange import (
    TimeChange,
    TimeChangeError,
    compute_time_change,
    invert_time_change,
    time_changed_V,
)

__version__ = "0.1.0"
