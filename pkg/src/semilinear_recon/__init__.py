"""Recover the semilinear term ``F`` in ``-Lap u = F(u)`` on the unit square from boundary fluxes."""

from .forward import ConvergenceError, LinearProblem, SolverSettings, solve_linear, solve_semilinear
from .grid import BoundaryTrace, Grid2D, build_grid, dirichlet_g, l2_norm, normal_derivative
from .invert import (LevelInversion, ReconstructedF, RegularizationParams, reconstruct,
                     relative_error, run_inversion, run_level, threshold_step)
from .kernels import BACKEND
from .measure import MeasurementGeometry, MeasurementSet, d_delta, synthesize
from .nonlinearity import Nonlinearity

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BoundaryTrace", "ConvergenceError", "Grid2D", "LevelInversion", "LinearProblem",
    "MeasurementGeometry", "MeasurementSet", "Nonlinearity", "ReconstructedF",
    "RegularizationParams", "SolverSettings", "build_grid", "d_delta", "dirichlet_g", "l2_norm",
    "normal_derivative", "reconstruct", "relative_error", "run_inversion", "run_level",
    "solve_linear", "solve_semilinear", "synthesize", "threshold_step",
]
