import numpy as np
import pytest

from ferrosim.grid import ScalarField, create_grid
from ferrosim.verification import (SIDE, BumpConfig, ConvergenceResult,
                                   coarsen, gaussian_bump, l2_error,
                                   run_suite, verification_config)


@pytest.fixture
def setup32():
    cfg = verification_config(32, 5e-14, 2)
    return cfg.make_stack()


def test_bump_center_value(setup32):
    stack = setup32
    grid = stack.grid
    bc = BumpConfig()
    P = gaussian_bump(grid, bc, stack)
    i = grid.nx // 2
    z = grid.z_centers()
    k = int(np.argmin(np.abs(z - bc.z0)))
    # at the lateral midpoint the Gaussian reduces to its z profile; the cell
    # center is offset half a cell from Lx/2
    x = grid.x_centers()[i]
    expect = bc.amplitude * np.exp(
        -2 * (x - 0.5 * grid.Lx) ** 2 / (2 * bc.sigma1**2)
        - (z[k] - bc.z0) ** 2 / (2 * bc.sigma2**2))
    assert P.interior[i, i, k] == pytest.approx(expect, rel=1e-12)


def test_bump_far_corner_negligible(setup32):
    stack = setup32
    P = gaussian_bump(stack.grid, BumpConfig(), stack)
    assert abs(P.interior[0, 0, stack.fe_k_hi - 1]) < 0.002 * np.exp(-10)


def test_bump_zero_outside_fe(setup32):
    stack = setup32
    P = gaussian_bump(stack.grid, BumpConfig(), stack)
    assert np.all(P.interior[~stack.fe_mask] == 0.0)


def test_bump_integral_matches_analytic(setup32):
    stack = setup32
    bc = BumpConfig()
    P = gaussian_bump(stack.grid, bc, stack)
    got = P.interior.sum() * stack.grid.cell_volume
    analytic = bc.amplitude * (2 * np.pi) ** 1.5 * bc.sigma1**2 * bc.sigma2
    assert got == pytest.approx(analytic, rel=0.01)


def test_bump_support_violation_rejected(setup32):
    stack = setup32
    with pytest.raises(ValueError):
        gaussian_bump(stack.grid, BumpConfig(z0=30.0e-9), stack)


def test_coarsen_constant_and_linear():
    const = np.full((8, 8, 8), 3.7)
    np.testing.assert_array_equal(coarsen(const), np.full((4, 4, 4), 3.7))
    grid = create_grid(8, 8, 8, 1.0, 1.0, 1.0)
    x, y, z = grid.meshgrid()
    lin = 2 * x - y + 0.5 * z
    coarse_grid = create_grid(4, 4, 4, 2.0, 2.0, 2.0)
    xc, yc, zc = coarse_grid.meshgrid()
    np.testing.assert_allclose(coarsen(lin), 2 * xc - yc + 0.5 * zc, rtol=1e-12)


def test_coarsen_matches_loop_oracle():
    rng = np.random.default_rng(5)
    fine = rng.normal(size=(6, 4, 8))
    got = coarsen(fine)
    for i in range(3):
        for j in range(2):
            for k in range(4):
                block = fine[2 * i:2 * i + 2, 2 * j:2 * j + 2, 2 * k:2 * k + 2]
                assert got[i, j, k] == pytest.approx(block.mean(), rel=1e-13)


def test_coarsen_rejects_odd():
    with pytest.raises(ValueError):
        coarsen(np.zeros((5, 4, 4)))


def test_l2_error_basics():
    a = np.zeros((4, 4, 4))
    assert l2_error(a, a) == 0.0
    assert l2_error(a + 2.0, a) == pytest.approx(2.0)
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=(2, 4, 4, 4))
    serial = np.sqrt(sum((xv - yv) ** 2 for xv, yv in zip(x.ravel(), y.ravel()))
                     / x.size)
    assert l2_error(x, y) == pytest.approx(serial, rel=1e-13)


def test_convergence_result_rate_definition():
    r = ConvergenceResult("spatial", "P", 4.0, 1.0)
    assert r.rate == pytest.approx(2.0, abs=1e-12)


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        run_suite("nope")


def test_temporal_suites_small_grid():
    """Desk-scale proxy at 16^3: observed orders match the integrators."""
    r1 = run_suite("temporal_order1", n_grid=16, base_dt=1e-13)
    rates1 = {r.quantity: r.rate for r in r1}
    assert rates1["P"] == pytest.approx(1.0, abs=0.15)
    assert rates1["Phi"] == pytest.approx(1.0, abs=0.15)
    r2 = run_suite("temporal_order2", n_grid=16, base_dt=1e-13)
    rates2 = {r.quantity: r.rate for r in r2}
    assert rates2["P"] == pytest.approx(2.0, abs=0.2)
    assert rates2["Phi"] == pytest.approx(2.0, abs=0.2)
