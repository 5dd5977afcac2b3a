"""Stochastic Galerkin RK-DG solver for 1D random scalar conservation laws.

Solves periodic scalar conservation laws with uncertain initial data and
sources by a Legendre-chaos Stochastic Galerkin discretization in the random
variable and a Runge-Kutta Discontinuous Galerkin discretization in space and
time, and computes residual-based a posteriori error bounds via space-time
reconstructions and the relative-entropy stability framework.
"""

from .chaos import UniformDistribution, StochasticBasis, gauss_quadrature, moments
from .system import FluxLaw, RandomField, sg_flux, sg_flux_exact_mode, project_source
from .dg import (
    Mesh1D,
    DGSpace,
    SGCoefficientField,
    NumericalFlux,
    uniform_mesh,
    project_initial,
    apply_Lh,
    apply_limiter,
    eval_field,
)
from .timestepping import RKScheme, Trajectory, SolverBlowUpError, ssprk3, rk3_7, rk_step, march
from .reconstruction import TemporalReconstruction, SpaceTimeReconstruction, spatial_reconstruct
from .estimator import (
    QuadratureConfig,
    ResidualReport,
    EstimatorReport,
    residual_norms,
    initial_error_split,
    compute_bound,
    exact_error,
)
from .cases import (
    TestCase,
    RunConfig,
    ConvergenceRow,
    registry,
    get_case,
    run,
    convergence_study,
)
from .reporting import emit, write_profile, read_table

__all__ = [
    "UniformDistribution",
    "StochasticBasis",
    "gauss_quadrature",
    "moments",
    "FluxLaw",
    "RandomField",
    "sg_flux",
    "sg_flux_exact_mode",
    "project_source",
    "Mesh1D",
    "DGSpace",
    "SGCoefficientField",
    "NumericalFlux",
    "uniform_mesh",
    "project_initial",
    "apply_Lh",
    "apply_limiter",
    "eval_field",
    "RKScheme",
    "Trajectory",
    "SolverBlowUpError",
    "ssprk3",
    "rk3_7",
    "rk_step",
    "march",
    "TemporalReconstruction",
    "SpaceTimeReconstruction",
    "spatial_reconstruct",
    "QuadratureConfig",
    "ResidualReport",
    "EstimatorReport",
    "residual_norms",
    "initial_error_split",
    "compute_bound",
    "exact_error",
    "TestCase",
    "RunConfig",
    "registry",
    "get_case",
    "run",
    "convergence_study",
    "ConvergenceRow",
    "emit",
    "write_profile",
    "read_table",
]
