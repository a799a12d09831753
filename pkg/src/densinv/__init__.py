"""Time-dependent density-to-potential inversion for one particle on a ring."""

__version__ = "0.1.0"

from .endpoint import EndpointClass, EndpointKind, classify, fit_decay, snap_exponent
from .errors import (
    ContractViolation,
    DensinvError,
    DimensionError,
    DivergenceError,
    DomainError,
    InvariantViolation,
    NumericError,
)
from .fixedpoint import InversionProblem, IterationReport, apply_F, estimate_contraction, generate_target, iterate
from .grid import Grid1D, SpaceTimeField, TimeGrid, WaveTrajectory, quadrature
from .norms import NormConfig, alpha_norm, check_equivalence, space_norm
from .observables import continuity_residual, current, density, force_balance_residual, zeta
from .propagator import InitialState, make_driving_potential, make_initial_bump, make_plane_wave, propagate
from .sturm import assemble, diagonalize, invert_direct, invert_eigenbasis, solve_sturm, track_spectrum

__all__ = [
    "Grid1D", "TimeGrid", "SpaceTimeField", "WaveTrajectory", "quadrature",
    "InitialState", "propagate", "make_initial_bump", "make_plane_wave", "make_driving_potential",
    "density", "current", "zeta", "continuity_residual", "force_balance_residual",
    "assemble", "diagonalize", "track_spectrum", "invert_direct", "invert_eigenbasis", "solve_sturm",
    "InversionProblem", "IterationReport", "apply_F", "iterate", "estimate_contraction", "generate_target",
    "NormConfig", "space_norm", "alpha_norm", "check_equivalence",
    "EndpointClass", "EndpointKind", "classify", "fit_decay", "snap_exponent",
    "DensinvError", "DimensionError", "DomainError", "ContractViolation", "InvariantViolation",
    "NumericError", "DivergenceError",
]
