"""Space-fractional diffusion ``u_t = (p(x) D^alpha u)'`` on [0, 1].

Modules
-------
lattice     grids, grid functions, discrete norms
fracops     fractional integrals and derivatives
mittag      Mittag-Leffler functions
operator    the discretized operator and its sector probes
resolvent   closed-form, series and matrix resolvent solvers
evolution   backward-Euler time stepping
verify      numerical checks of the underlying identities and inequalities
cli         command-line driver
"""

__version__ = "0.1.0"

from .lattice import (
    DomainViolationError,
    FracFluxError,
    Grid,
    GridFunction,
    GridMismatchError,
    InvalidGridError,
    InvalidOrderError,
    gagliardo_seminorm,
    l2_inner,
    l2_norm,
    make_uniform_grid,
    read_csv,
    sobolev_norm,
    weighted_half_norm,
    write_csv,
)
from .fracops import LEFT, RIGHT, caputo, difference_quotient, frac_integral, rl_derivative
from .mittag import MLParams, SectorSpec, ml_eval, ml_sector_min_modulus
from .operator import (
    Coefficient,
    OperatorMatrix,
    SpectrumHitError,
    apply_operator,
    assemble_operator,
    numerical_range_sample,
    resolvent_bound_probe,
)
from .resolvent import (
    BoundaryConstant,
    ResolventProblem,
    SectorError,
    WrongSolverError,
    boundary_constant,
    resolvent_closed_form,
    resolvent_matrix,
    series_oracle,
)
from .evolution import EvolutionProblem, Trajectory, evolve, smoothing_probe, step_backward_euler
from .verify import CheckReport, verify_all

__all__ = [
    "DomainViolationError",
    "FracFluxError",
    "Grid",
    "GridFunction",
    "GridMismatchError",
    "InvalidGridError",
    "InvalidOrderError",
    "gagliardo_seminorm",
    "l2_inner",
    "l2_norm",
    "make_uniform_grid",
    "read_csv",
    "sobolev_norm",
    "weighted_half_norm",
    "write_csv",
    "Coefficient",
    "OperatorMatrix",
    "SpectrumHitError",
    "apply_operator",
    "assemble_operator",
    "numerical_range_sample",
    "resolvent_bound_probe",
    "BoundaryConstant",
    "ResolventProblem",
    "SectorError",
    "WrongSolverError",
    "boundary_constant",
    "resolvent_closed_form",
    "resolvent_matrix",
    "series_oracle",
    "LEFT",
    "RIGHT",
    "caputo",
    "difference_quotient",
    "frac_integral",
    "rl_derivative",
    "MLParams",
    "SectorSpec",
    "ml_eval",
    "ml_sector_min_modulus",
    "EvolutionProblem",
    "Trajectory",
    "evolve",
    "smoothing_probe",
    "step_backward_euler",
    "CheckReport",
    "verify_all",
]
