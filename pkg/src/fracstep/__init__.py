"""Solvers for A_h**alpha u = f with 0 < alpha < 1 on FEM-discretized
second-order elliptic operators, via rational-approximant time stepping."""

from ._kernels import BACKEND, NUMBA_ENABLED
from .fem import (
    DiscreteOperator,
    GridFunction,
    assemble_1d,
    assemble_2d_tensor,
    data_case,
    export_dof_coords_csv,
    export_matrix_coo,
    l2_project,
    m_inner,
    m_norm,
)
from .meshes import (
    TimeMesh,
    build_geometric_mesh,
    build_graded_spatial_mesh,
    build_uniform_mesh,
)
from .pade import (
    PadeRational,
    approximation_error,
    error_bound_constant,
    eval_partial_fractions,
    eval_rational,
    pade_coefficients,
    pade_error_bound_check,
    partial_fractions,
)
from .scalar import (
    ScalarRunConfig,
    exact_power,
    fit_loglog_slope,
    scalar_error_sweep,
    scalar_grm,
    scalar_run_grid,
    scalar_um,
)
from .solvers import SolveError, SolverPolicy, solve_spd
from .spectral import (
    SpectralDecomposition,
    discrete_sobolev_norm,
    eig_1d,
    eig_2d_tensor,
    reference_power,
)
from .stepping import (
    RunStats,
    SpectralBounds,
    StepperConfig,
    apply_pade_step,
    default_delta,
    estimate_spectral_bounds,
    run_grm,
    run_um,
)
from .experiments import (
    ExperimentSpec,
    convergence_order,
    run_scalar_diagnostics,
    run_spatial_refinement,
    run_table_1d,
    run_table_2d,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "NUMBA_ENABLED",
    "DiscreteOperator",
    "GridFunction",
    "PadeRational",
    "ScalarRunConfig",
    "SolveError",
    "SolverPolicy",
    "SpectralBounds",
    "SpectralDecomposition",
    "StepperConfig",
    "RunStats",
    "TimeMesh",
    "ExperimentSpec",
    "apply_pade_step",
    "approximation_error",
    "assemble_1d",
    "assemble_2d_tensor",
    "build_geometric_mesh",
    "build_graded_spatial_mesh",
    "build_uniform_mesh",
    "convergence_order",
    "data_case",
    "default_delta",
    "discrete_sobolev_norm",
    "eig_1d",
    "eig_2d_tensor",
    "error_bound_constant",
    "estimate_spectral_bounds",
    "eval_partial_fractions",
    "eval_rational",
    "exact_power",
    "export_dof_coords_csv",
    "export_matrix_coo",
    "fit_loglog_slope",
    "l2_project",
    "m_inner",
    "m_norm",
    "pade_coefficients",
    "pade_error_bound_check",
    "partial_fractions",
    "reference_power",
    "run_grm",
    "run_scalar_diagnostics",
    "run_spatial_refinement",
    "run_table_1d",
    "run_table_2d",
    "run_um",
    "scalar_error_sweep",
    "scalar_grm",
    "scalar_run_grid",
    "scalar_um",
    "solve_spd",
    "__version__",
]
