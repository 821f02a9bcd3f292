"""Desk-scale numerical checks of the analytic properties the method relies on.

Each check returns a :class:`CheckReport`; ``passed`` is exactly
``violation <= tolerance``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .forward import (DEFAULT_SETTINGS, ConvergenceError, LinearProblem, SolverSettings,
                      solve_linear, solve_reaction, solve_semilinear)
from .grid import Grid2D, Node, build_grid
from .nonlinearity import Nonlinearity, get, registry_names


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    violation: float
    tolerance: float

    @classmethod
    def make(cls, name, violation, tolerance):
        violation = float(violation)
        return cls(name, bool(violation <= tolerance), violation, float(tolerance))

    def to_dict(self) -> dict:
        return asdict(self)


def check_admissible(F: Nonlinearity, samples: int = 10_000) -> CheckReport:
    """``F(0) == 0`` and ``F`` non-increasing on a uniform lattice of ``[0, 1]``."""
    s = np.linspace(0.0, 1.0, samples)
    v = np.asarray(F(s), dtype=float)
    at_zero = abs(float(np.asarray(F(0.0))))
    rise = float(np.max(np.diff(v), initial=0.0))
    # F(0) must vanish exactly; any positive increment beyond 1e-12 is a failure
    violation = max(rise - 1e-12, 0.0) + (math.inf if at_zero != 0.0 else 0.0)
    return CheckReport.make(f"admissible[{F.name}]", violation, 0.0)


def check_max_principle(F: Nonlinearity, delta: float, grid: Grid2D,
                        settings: SolverSettings = DEFAULT_SETTINGS) -> CheckReport:
    """Computed ``u`` stays inside ``[0, delta]`` up to ``10 * picard_tol``."""
    u = solve_semilinear(grid, F, delta, settings)
    violation = max(float(-u.min()), float(u.max() - delta), 0.0)
    return CheckReport.make(f"max_principle[{F.name},delta={delta},n={grid.n}]",
                            violation, 10 * settings.picard_tol)


def check_sandwich(F: Nonlinearity, delta: float, M_bound: float, grid: Grid2D,
                   settings: SolverSettings = DEFAULT_SETTINGS) -> CheckReport:
    """``v_M <= u <= v_0`` nodewise, where ``v_tau`` solves ``-Lap v + tau v = 0``."""
    u = solve_semilinear(grid, F, delta, settings)
    upper = solve_reaction(grid, 0.0, delta, settings)
    lower = solve_reaction(grid, M_bound, delta, settings)
    violation = max(float(np.max(lower - u)), float(np.max(u - upper)), 0.0)
    return CheckReport.make(f"sandwich[{F.name},delta={delta},n={grid.n}]",
                            violation, 10 * settings.picard_tol)


# test functions vanishing on the boundary: (w, -Lap w, grad w)
def _bubble(x, y):
    return x * (1 - x) * y * (1 - y)


def _bubble_neg_lap(x, y):
    return 2 * y * (1 - y) + 2 * x * (1 - x)


def _bubble_grad(x, y):
    return (1 - 2 * x) * y * (1 - y), x * (1 - x) * (1 - 2 * y)


def _sine(x, y):
    return np.sin(np.pi * x) * np.sin(np.pi * y)


def _sine_neg_lap(x, y):
    return 2 * np.pi**2 * _sine(x, y)


def _sine_grad(x, y):
    return (np.pi * np.cos(np.pi * x) * np.sin(np.pi * y),
            np.pi * np.sin(np.pi * x) * np.cos(np.pi * y))


TEST_FUNCTIONS = {
    "bubble": (_bubble, _bubble_neg_lap, _bubble_grad),
    "sine": (_sine, _sine_neg_lap, _sine_grad),
    "zero": (lambda x, y: 0 * x, lambda x, y: 0 * x, lambda x, y: (0 * x, 0 * y)),
}


def discrete_poisson_kernel(grid: Grid2D, x0: Node, q: float = 0.0,
                            settings: SolverSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Solve ``-Lap P + q P = 0`` with boundary data ``1/h`` at ``x0`` and zero elsewhere."""
    if not grid.is_boundary(x0) or grid.is_corner(x0):
        raise ValueError(f"{x0} must be a non-corner boundary node")
    bc = grid.zeros()
    bc[x0] = 1.0 / grid.h
    return solve_linear(LinearProblem(grid, grid.zeros(), bc, q), settings)


def green_identity_residual(test_function: str, q: float, x0: Node, grid: Grid2D,
                            settings: SolverSettings = DEFAULT_SETTINGS) -> float:
    """``|h^2 sum (-Lap w + q w) P + d_nu w(x0)|`` over interior nodes."""
    w, neg_lap, grad = TEST_FUNCTIONS[test_function]
    P = discrete_poisson_kernel(grid, x0, q, settings)
    X, Y = grid.mesh()
    integrand = (neg_lap(X, Y) + q * w(X, Y)) * P
    lhs = grid.h**2 * float(np.sum(integrand[1:-1, 1:-1]))
    i, j = x0
    x, y = i * grid.h, j * grid.h
    gx, gy = grad(x, y)
    if i == grid.n:
        dn = gx
    elif i == 0:
        dn = -gx
    elif j == grid.n:
        dn = gy
    else:
        dn = -gy
    return abs(lhs + float(dn))


def check_green_identity(q_const: float, x0_node: Node, grid: Grid2D, test_function: str = "bubble",
                         settings: SolverSettings = DEFAULT_SETTINGS, C: float = 1.0) -> CheckReport:
    """Discrete analogue of the Poisson-kernel representation of the boundary flux.

    Passes when the residual is at most ``C * h``.
    """
    if q_const < 0:
        raise ValueError("q must be non-negative")
    res = green_identity_residual(test_function, q_const, x0_node, grid, settings)
    return CheckReport.make(f"green_identity[{test_function},q={q_const},n={grid.n}]",
                            res, C * grid.h)


SUITE_DELTAS = (0.25, 0.5, 1.0)
SUITE_SIZES = (32, 64)


def run_suite(settings: SolverSettings = DEFAULT_SETTINGS, sizes=SUITE_SIZES,
              deltas=SUITE_DELTAS) -> list[CheckReport]:
    """Admissibility, max-principle and sandwich checks over the registry, plus Green-identity checks.

    A solver failure during a check is reported as a failed check with infinite violation.
    """
    reports = []
    for name in registry_names():
        F = get(name)
        reports.append(check_admissible(F))
        for n in sizes:
            grid = build_grid(n)
            for delta in deltas:
                try:
                    reports.append(check_max_principle(F, delta, grid, settings))
                    reports.append(check_sandwich(F, delta, F.slope_bound, grid, settings))
                except ConvergenceError:
                    reports.append(CheckReport(f"solver[{name},delta={delta},n={n}]", False,
                                               math.inf, 0.0))
    for tf in ("bubble", "sine"):
        for q in (0.0, 1.0):
            for n in sizes:
                grid = build_grid(n)
                try:
                    reports.append(check_green_identity(q, (n, n // 2), grid, tf, settings))
                except ConvergenceError:
                    reports.append(CheckReport(f"green_identity[{tf},q={q},n={n}]", False,
                                               math.inf, 0.0))
    return reports
