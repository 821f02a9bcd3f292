"""Finite-difference solvers: SOR for ``-Lap v + tau v = f`` and Picard-SOR for ``-Lap u = F(u)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .grid import Grid2D, boundary_mask, dirichlet_g, harmonic_lift
from .nonlinearity import Nonlinearity


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap before meeting its tolerance."""


@dataclass(frozen=True)
class SolverSettings:
    """Tolerances and caps for the linear and Picard iterations.

    ``omega=None`` selects ``2 / (1 + sin(pi h))``; ``sor_max_iter=None`` means ``100 n^2`` sweeps.
    """

    omega: float | None = None
    sor_tol: float = 1e-10
    sor_max_iter: int | None = None
    picard_tol: float = 1e-8
    picard_max_iter: int = 200

    def __post_init__(self):
        if self.omega is not None and not 1.0 < self.omega < 2.0:
            raise ValueError(f"omega must lie in (1, 2), got {self.omega}")
        if self.sor_tol <= 0 or self.picard_tol <= 0:
            raise ValueError("tolerances must be positive")
        if (self.sor_max_iter is not None and self.sor_max_iter < 1) or self.picard_max_iter < 1:
            raise ValueError("iteration caps must be >= 1")

    def omega_for(self, grid: Grid2D) -> float:
        if self.omega is not None:
            return self.omega
        return 2.0 / (1.0 + math.sin(math.pi * grid.h))

    def sweeps_for(self, grid: Grid2D) -> int:
        return self.sor_max_iter if self.sor_max_iter is not None else 100 * grid.n**2

    def with_(self, **kw) -> "SolverSettings":
        return replace(self, **kw)


DEFAULT_SETTINGS = SolverSettings()


@dataclass(frozen=True)
class LinearProblem:
    """``-Lap v + tau v = source`` inside, ``v = dirichlet`` on the boundary."""

    grid: Grid2D
    source: np.ndarray
    dirichlet: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"tau must be non-negative, got {self.tau}")
        if self.source.shape != self.grid.shape or self.dirichlet.shape != self.grid.shape:
            raise ValueError("source/dirichlet do not match the grid")


def solve_linear(problem: LinearProblem, settings: SolverSettings = DEFAULT_SETTINGS,
                 initial: np.ndarray | None = None) -> np.ndarray:
    """Solve the 5-point system to relative residual ``settings.sor_tol``.

    ``initial`` is an optional warm start; only its interior values are used.
    """
    grid = problem.grid
    bmask = boundary_mask(grid)
    f = np.ascontiguousarray(problem.source, dtype=float)

    v = np.zeros(grid.shape)
    v[bmask] = problem.dirichlet[bmask]
    # residual of the zero-interior field is the full right-hand side
    rhs_norm = kernels.residual_norm(v, f, grid.h, problem.tau)
    if rhs_norm == 0.0:
        return v
    if initial is not None:
        v[1:-1, 1:-1] = initial[1:-1, 1:-1]

    sweeps, res = kernels.sor_solve(v, f, grid.h, float(problem.tau), settings.omega_for(grid),
                                    rhs_norm, settings.sor_tol, settings.sweeps_for(grid))
    if not res <= settings.sor_tol:
        raise ConvergenceError(f"SOR stopped after {sweeps} sweeps at relative residual {res:.3e}")
    return v


def solve_semilinear(grid: Grid2D, F: Nonlinearity, delta: float,
                     settings: SolverSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Picard-SOR for ``-Lap u = F(u)``, ``u = delta * y`` on the boundary.

    ``F`` is evaluated on the iterate clamped to ``[0, delta]``. Starts from the
    harmonic lift and stops when the sup-norm change is at most ``picard_tol``.
    """
    bc = dirichlet_g(grid, delta)
    u = harmonic_lift(grid, delta)
    for _ in range(settings.picard_max_iter):
        src = np.asarray(F(np.clip(u, 0.0, delta)), dtype=float)
        u_new = solve_linear(LinearProblem(grid, src, bc), settings, initial=u)
        change = float(np.max(np.abs(u_new - u)))
        u = u_new
        if change <= settings.picard_tol:
            return u
    raise ConvergenceError(
        f"Picard iteration for {F.name} (delta={delta}) did not settle in {settings.picard_max_iter} steps"
    )


def solve_reaction(grid: Grid2D, tau: float, delta: float,
                   settings: SolverSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """``-Lap v + tau v = 0`` with ``v = delta * y`` on the boundary."""
    return solve_linear(LinearProblem(grid, grid.zeros(), dirichlet_g(grid, delta), tau), settings,
                        initial=harmonic_lift(grid, delta))
