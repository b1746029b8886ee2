"""Numerical laboratory for the semilinear field equation
-(Laplacian u) + A |x|^(-alpha) u = f(u) on R^N.

The package computes the closed-form exponent thresholds that organize the
(alpha, p) parameter plane, classifies existence regions, counts admissible
symmetry indices, discretizes the weighted radial and biradial energies,
builds concentrating test functions with certified energy upper bounds,
estimates the radial ground-state level from below, and runs a mountain-pass
solver on symmetry-reduced problems to produce nonradial critical points
whose levels sit strictly below the radial floor.
"""

from __future__ import annotations

from singwell.discretization import (
    BiradialGrid,
    BiradialProfile,
    RadialGrid,
    RadialProfile,
    biradial_grid,
    energy_and_gradient,
    lift_radial,
    norm_A,
    radial_grid,
    radialize,
    sphere_area,
)
from singwell.exponents import (
    ExponentTable,
    ProblemParams,
    RegionStatus,
    RegionVerdict,
    classify_region,
    critical_exponents,
    level_exponents,
    nu_and_admissible_K,
)
from singwell.nonlinearity import (
    AssumptionReport,
    NonlinearitySpec,
    check_assumptions,
    find_mu,
    make_builtin,
    make_custom,
)
from singwell.radial_solver import (
    FiberingResult,
    LowerBoundCert,
    chain_constants,
    check_radial_bound,
    default_trial_family,
    estimate_mA,
    fibering_max,
    lower_bound_chain,
    sobolev_constant,
)
from singwell.biradial_solver import (
    MountainPassPath,
    SeparationRow,
    SeparationTable,
    SolutionRecord,
    mountain_pass_floor,
    mpa_solve,
    negative_energy_endpoint,
    profile_distance,
    separation_check,
    solve_well_scaled,
    verify_solution,
)
from singwell.testfunction import (
    BumpSpec,
    ScaledBump,
    angular_weight,
    build_ubar,
    calibrate_amplitude,
    direct_integrals,
    energy_ratio,
    limit_integrals,
    path_upper_bound,
    polar_direct_integrals,
    ratio_and_A0,
    reduced_integrals,
)

__version__ = "0.1.0"

__all__ = [
    "ProblemParams",
    "ExponentTable",
    "RegionStatus",
    "RegionVerdict",
    "critical_exponents",
    "classify_region",
    "nu_and_admissible_K",
    "level_exponents",
    "NonlinearitySpec",
    "AssumptionReport",
    "make_builtin",
    "make_custom",
    "check_assumptions",
    "find_mu",
    "RadialGrid",
    "BiradialGrid",
    "RadialProfile",
    "BiradialProfile",
    "radial_grid",
    "biradial_grid",
    "norm_A",
    "energy_and_gradient",
    "radialize",
    "lift_radial",
    "sphere_area",
    "BumpSpec",
    "ScaledBump",
    "angular_weight",
    "reduced_integrals",
    "polar_direct_integrals",
    "direct_integrals",
    "limit_integrals",
    "energy_ratio",
    "ratio_and_A0",
    "build_ubar",
    "path_upper_bound",
    "calibrate_amplitude",
    "FiberingResult",
    "LowerBoundCert",
    "sobolev_constant",
    "fibering_max",
    "default_trial_family",
    "estimate_mA",
    "chain_constants",
    "lower_bound_chain",
    "check_radial_bound",
    "MountainPassPath",
    "SolutionRecord",
    "SeparationRow",
    "SeparationTable",
    "mountain_pass_floor",
    "negative_energy_endpoint",
    "mpa_solve",
    "verify_solution",
    "separation_check",
    "solve_well_scaled",
    "profile_distance",
    "__version__",
]
