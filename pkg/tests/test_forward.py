import numpy as np
import pytest

from semilinear_recon import nonlinearity as nl
from semilinear_recon.forward import (ConvergenceError, LinearProblem, SolverSettings, solve_linear,
                                      solve_reaction, solve_semilinear)
from semilinear_recon.grid import build_grid, dirichlet_g, harmonic_lift

from oracles import dense_solve, fourier_center_value, observed_orders


def test_settings_validation():
    with pytest.raises(ValueError):
        SolverSettings(omega=2.0)
    with pytest.raises(ValueError):
        SolverSettings(sor_tol=0)
    with pytest.raises(ValueError):
        SolverSettings(picard_max_iter=0)
    assert SolverSettings().omega_for(build_grid(32)) == pytest.approx(2 / (1 + np.sin(np.pi / 32)))


def test_negative_tau_rejected(grid32):
    with pytest.raises(ValueError):
        LinearProblem(grid32, grid32.zeros(), grid32.zeros(), -1.0)


@pytest.mark.parametrize("delta", [0.0, 0.4, 1.0])
def test_linear_harmonic_lift(grid32, delta):
    s = SolverSettings()
    v = solve_linear(LinearProblem(grid32, grid32.zeros(), dirichlet_g(grid32, delta)), s)
    assert np.max(np.abs(v - harmonic_lift(grid32, delta))) <= 10 * s.sor_tol


def test_linear_fourier_center(grid32):
    v = solve_linear(LinearProblem(grid32, np.ones(grid32.shape), grid32.zeros()))
    assert abs(v[16, 16] - fourier_center_value()) < 1e-3
    assert fourier_center_value() == pytest.approx(0.07367, abs=1e-5)


@pytest.mark.parametrize("tau", [0.0, 3.0])
def test_linear_matches_dense(tau, rng):
    g = build_grid(8)
    src = rng.standard_normal(g.shape)
    bc = dirichlet_g(g, 0.7)
    v = solve_linear(LinearProblem(g, src, bc, tau), SolverSettings(sor_tol=1e-14))
    assert np.max(np.abs(v - dense_solve(8, src, bc, tau))) <= 1e-12


def test_linear_warm_start_same_answer(grid32, rng):
    src = rng.standard_normal(grid32.shape)
    bc = dirichlet_g(grid32, 1.0)
    p = LinearProblem(grid32, src, bc)
    cold = solve_linear(p)
    warm = solve_linear(p, initial=cold + 1e-3)
    assert np.max(np.abs(cold - warm)) < 1e-9


def test_linear_nonconvergence_raises(grid32):
    p = LinearProblem(grid32, np.ones(grid32.shape), grid32.zeros())
    with pytest.raises(ConvergenceError):
        solve_linear(p, SolverSettings(sor_max_iter=3))


def test_semilinear_zero_is_lift(grid32):
    u = solve_semilinear(grid32, nl.get("zero"), 0.8)
    assert np.max(np.abs(u - harmonic_lift(grid32, 0.8))) <= 1e-8


def test_semilinear_cubic_below_lift(grid64, cubic):
    s = SolverSettings()
    u = solve_semilinear(grid64, cubic, 1.0, s)
    assert u.min() >= -10 * s.picard_tol
    assert np.all(u <= harmonic_lift(grid64, 1.0) + 10 * s.picard_tol)
    np.testing.assert_array_equal(u[:, -1], 1.0)


def test_semilinear_fixed_point(grid32, cubic):
    u = solve_semilinear(grid32, cubic, 1.0)
    again = solve_linear(LinearProblem(grid32, cubic(u), dirichlet_g(grid32, 1.0)))
    assert np.max(np.abs(again - u)) < 1e-7


def test_semilinear_refinement_order():
    F = nl.get("neg_u")
    ref = solve_semilinear(build_grid(128), F, 1.0)
    errs = []
    for n in (16, 32):
        u = solve_semilinear(build_grid(n), F, 1.0)
        errs.append(np.max(np.abs(u - ref[:: 128 // n, :: 128 // n])))
    (p,) = observed_orders(errs)
    assert 1.7 <= p <= 2.3


def test_picard_cap_raises(grid32, cubic):
    with pytest.raises(ConvergenceError):
        solve_semilinear(grid32, cubic, 1.0, SolverSettings(picard_max_iter=1))


@pytest.mark.parametrize("name", nl.registry_names())
def test_monotone_in_delta(grid32, name):
    F = nl.get(name)
    tol = 10 * SolverSettings().picard_tol
    prev = None
    for delta in (0.2, 0.5, 0.9):
        u = solve_semilinear(grid32, F, delta)
        if prev is not None:
            assert np.all(prev <= u + tol)
        prev = u


def test_linearity_for_zero_source(grid32):
    Z = nl.get("zero")
    u1 = solve_semilinear(grid32, Z, 1.0)
    for delta in (0.25, 0.6):
        assert np.max(np.abs(solve_semilinear(grid32, Z, delta) - delta * u1)) < 1e-12


def test_reaction_solutions_ordered(grid32):
    v0 = solve_reaction(grid32, 0.0, 1.0)
    v3 = solve_reaction(grid32, 3.0, 1.0)
    assert np.all(v3 <= v0 + 1e-12)
    assert v3[16, 16] < v0[16, 16]
