import numpy as np
import pytest

from ferrosim.constants import EPS0
from ferrosim.grid import ScalarField, ZRule, create_grid, exchange_ghosts
from ferrosim.materials import FerroelectricParams, Layer, build_stack
from ferrosim.poisson import (MultigridConfig, MultigridSolver,
                              PoissonConvergenceError, PoissonProblem,
                              apply_operator, assemble_rhs, electric_field,
                              solve)
from ferrosim.verification import l2_error, poisson_manufactured_errors


def _random_eps(grid, seed=0):
    rng = np.random.default_rng(seed)
    eps = ScalarField.zeros(grid)
    eps.interior[...] = EPS0 * rng.uniform(1.0, 30.0, size=grid.shape)
    return exchange_ghosts(eps)


def _dense_operator(eps, grid, v_lo=0.0, v_hi=0.0):
    """Brute-force matrix of the discrete operator via apply_operator."""
    n = np.prod(grid.shape)
    A = np.zeros((n, n))
    for idx in range(n):
        phi = ScalarField.zeros(grid, ZRule.dirichlet(0.0, 0.0))
        phi.interior[np.unravel_index(idx, grid.shape)] = 1.0
        exchange_ghosts(phi)
        A[:, idx] = apply_operator(eps, phi).interior.ravel()
    return A


def test_solution_matches_dense_solve():
    grid = create_grid(6, 4, 4, 1e-9, 1e-9, 1e-9)
    eps = _random_eps(grid, seed=1)
    rng = np.random.default_rng(2)
    rhs = ScalarField.zeros(grid)
    rhs.interior[...] = rng.normal(size=grid.shape)
    exchange_ghosts(rhs)
    phi = solve(PoissonProblem(eps, rhs, 0.0, 0.0, tol=1e-12))
    A = _dense_operator(eps, grid)
    ref = np.linalg.solve(A, rhs.interior.ravel()).reshape(grid.shape)
    assert l2_error(phi.interior, ref) < 1e-10 * max(1.0, np.abs(ref).max())


def test_solve_honours_dirichlet_values():
    grid = create_grid(4, 4, 8, 1e-9, 1e-9, 1e-9)
    eps = ScalarField.full(grid, EPS0 * 5.0)
    rhs = ScalarField.zeros(grid)
    phi = solve(PoissonProblem(eps, rhs, 1.0, 3.0, tol=1e-12))
    # uniform eps, zero rhs -> linear profile between the contacts
    z = grid.z_centers()
    expected = 1.0 + (3.0 - 1.0) * z / grid.Lz
    np.testing.assert_allclose(phi.interior[2, 2, :], expected, rtol=1e-9)


def test_series_capacitor_analytic():
    """Two-layer zero-RHS problem: interface potential and layer fields from
    continuity of eps*E."""
    grid = create_grid(4, 4, 18, 0.5e-9, 0.5e-9, 0.5e-9)
    t1, e1 = 4.0e-9, 10.0   # bottom layer
    t2, e2 = 5.0e-9, 24.0   # top layer
    eps = ScalarField.zeros(grid)
    z = grid.z_centers()
    eps.interior[...] = np.where(z < t1, EPS0 * e1, EPS0 * e2)
    exchange_ghosts(eps)
    v = 1.0
    phi = solve(PoissonProblem(eps, ScalarField.zeros(grid), 0.0, v, tol=1e-13))
    # analytic: E1*t1 + E2*t2 = v, e1*E1 = e2*E2
    E1 = v / (t1 + t2 * e1 / e2)
    v_int = E1 * t1
    prof = phi.interior[0, 0, :]
    exact = np.where(z < t1, E1 * z, v_int + (v - v_int) * (z - t1) / t2)
    np.testing.assert_allclose(prof, exact, rtol=1e-10, atol=1e-12)


def test_x_translation_symmetry():
    grid = create_grid(8, 4, 6, 1e-9, 1e-9, 1e-9)
    eps = ScalarField.full(grid, EPS0 * 3.0)
    rhs = ScalarField.zeros(grid)
    rng = np.random.default_rng(5)
    rhs.interior[...] = rng.normal(size=grid.shape)
    exchange_ghosts(rhs)
    phi = solve(PoissonProblem(eps, rhs, 0.0, 0.0, tol=1e-12))
    rolled = ScalarField.zeros(grid)
    rolled.interior[...] = np.roll(rhs.interior, 3, axis=0)
    exchange_ghosts(rolled)
    phi2 = solve(PoissonProblem(eps, rolled, 0.0, 0.0, tol=1e-12))
    np.testing.assert_allclose(phi2.interior, np.roll(phi.interior, 3, axis=0),
                               rtol=1e-8, atol=1e-14)


def test_vcycle_contracts_residual():
    grid = create_grid(16, 16, 16, 1e-9, 1e-9, 1e-9)
    eps = _random_eps(grid, seed=7)
    rng = np.random.default_rng(8)
    rhs = rng.normal(size=grid.shape)
    solver = MultigridSolver(grid, eps)
    lv = solver.levels[0]
    b = solver.lift_rhs(rhs, 0.0, 0.0)
    phi = np.zeros(grid.shape)
    res = np.empty(grid.shape)
    solver._residual(lv, phi, b, res)
    prev = np.linalg.norm(res)
    for _ in range(4):
        solver._vcycle(0, phi, b)
        solver._residual(lv, phi, b, res)
        cur = np.linalg.norm(res)
        assert cur < 0.5 * prev
        prev = cur


def test_manufactured_solution_second_order():
    errors, cycles = poisson_manufactured_errors(ns=(16, 32, 64), tol=1e-11)
    rates = [np.log2(a / b) for a, b in zip(errors[:-1], errors[1:])]
    for r in rates:
        assert abs(r - 2.0) < 0.1
    assert all(c <= 30 for c in cycles)


def test_nonconvergence_raises():
    grid = create_grid(8, 8, 8, 1e-9, 1e-9, 1e-9)
    eps = _random_eps(grid, seed=11)
    rng = np.random.default_rng(12)
    rhs = ScalarField.zeros(grid)
    rhs.interior[...] = rng.normal(size=grid.shape)
    solver = MultigridSolver(grid, eps, MultigridConfig(max_vcycles=1,
                                                        bottom_solver="smoother",
                                                        bottom_sweeps=1))
    with pytest.raises(PoissonConvergenceError):
        solver.solve(PoissonProblem(eps, rhs, 0.0, 0.0, tol=1e-14))


def test_assemble_rhs_interior_interface_charge():
    """dP/dz of a uniform P concentrates +/-P/dz at the layer faces (split by
    the eps-weighted face rule) and the volume integral vanishes when the
    layer sits inside the domain."""
    grid = create_grid(4, 4, 16, 0.5e-9, 0.5e-9, 0.5e-9)
    layers = (Layer("dielectric", 2.0e-9, eps_rel=10.0),
              Layer("ferroelectric", 4.0e-9),
              Layer("dielectric", 2.0e-9, eps_rel=10.0))
    stack = build_stack(layers, grid)
    p0 = 0.01
    P = ScalarField.zeros(grid)
    P.interior[stack.fe_mask] = p0
    exchange_ghosts(P)
    rhs = assemble_rhs(P, ScalarField.zeros(grid), stack)
    col = rhs.interior[0, 0, :]
    # face value at the DE|FE interface: pf = p0 * e_de / (e_de + e_fe)
    pf = p0 * 10.0 / (10.0 + 24.0)
    assert col[stack.fe_k_lo - 1] == pytest.approx(pf / grid.dz)
    assert col[stack.fe_k_lo] == pytest.approx((p0 - pf) / grid.dz)
    assert col[stack.fe_k_hi - 1] == pytest.approx(-(p0 - pf) / grid.dz)
    assert col[stack.fe_k_hi] == pytest.approx(-pf / grid.dz)
    assert np.sum(rhs.interior) * grid.cell_volume == pytest.approx(0.0, abs=1e-18)


def test_assemble_rhs_rejects_outside_polarization():
    grid = create_grid(4, 4, 8, 0.5e-9, 0.5e-9, 0.5e-9)
    layers = (Layer("dielectric", 2.0e-9, eps_rel=10.0),
              Layer("ferroelectric", 2.0e-9))
    stack = build_stack(layers, grid)
    P = ScalarField.full(grid, 0.01)
    with pytest.raises(ValueError):
        assemble_rhs(P, ScalarField.zeros(grid), stack)


def test_electric_field_of_linear_potential():
    grid = create_grid(6, 6, 6, 1e-9, 1e-9, 1e-9)
    phi = ScalarField.zeros(grid, ZRule.dirichlet(0.0, 2.0))
    z = grid.z_centers()
    phi.interior[...] = 2.0 * z[None, None, :] / grid.Lz
    exchange_ghosts(phi)
    ex, ey, ez = electric_field(phi)
    np.testing.assert_allclose(ez.interior, -2.0 / grid.Lz, rtol=1e-12)
    np.testing.assert_allclose(ex.interior, 0.0, atol=1e-12)


def test_gauss_law_discrete():
    """Applying the operator to the solved potential reproduces the rhs."""
    grid = create_grid(8, 8, 8, 1e-9, 1e-9, 1e-9)
    eps = _random_eps(grid, seed=21)
    rng = np.random.default_rng(22)
    rhs = ScalarField.zeros(grid)
    rhs.interior[...] = rng.normal(size=grid.shape) * 1e-3
    exchange_ghosts(rhs)
    phi = solve(PoissonProblem(eps, rhs, 0.0, 0.0, tol=1e-13))
    back = apply_operator(eps, phi)
    np.testing.assert_allclose(back.interior, rhs.interior, rtol=1e-6, atol=1e-13)
