import numpy as np
import pytest

from ferrosim.grid import ScalarField, ZRule, create_grid, exchange_ghosts
from ferrosim.materials import FerroelectricParams, Layer, build_stack
from ferrosim.tdgl import (PolarizationBC, boundary_face_value,
                           energy_breakdown, free_energy_frozen_potential,
                           landau_density, step_euler, step_trapezoidal,
                           tdgl_rhs)

FE = FerroelectricParams()
FREE = PolarizationBC("free")
SURF = PolarizationBC("surface_effect", 3.0e-9)


def _mfm_stack(nx=4, ny=4, nz=8, dz=0.5e-9):
    grid = create_grid(nx, ny, nz, dz, dz, dz)
    return build_stack((Layer("ferroelectric", nz * dz),), grid)


def _uniform_state(stack, value):
    P = ScalarField.zeros(stack.grid)
    P.interior[stack.fe_mask] = value
    exchange_ghosts(P)
    phi = ScalarField.zeros(stack.grid, ZRule.dirichlet(0.0, 0.0))
    exchange_ghosts(phi)
    return P, phi


def test_polarization_bc_validation():
    with pytest.raises(ValueError):
        PolarizationBC("surface_effect")          # missing lambda
    with pytest.raises(ValueError):
        PolarizationBC("free", 3e-9)              # lambda forbidden
    with pytest.raises(ValueError):
        PolarizationBC("clamped")


def test_face_closure_exact_on_exponential():
    """P = exp(z/lam) satisfies lam dP/dn = -P at the lower face exactly; the
    quadratic closure recovers the face value with O(dz^2)+ error."""
    lam = 3.0e-9
    bc = PolarizationBC("surface_effect", lam)
    errs = []
    for dz in (0.5e-9, 0.25e-9):
        p1 = np.exp(0.5 * dz / lam)
        p2 = np.exp(1.5 * dz / lam)
        pf = boundary_face_value(np.array(p1), np.array(p2), dz, bc)
        errs.append(abs(float(pf) - 1.0))
    assert errs[0] < 5e-4
    assert errs[1] < errs[0] / 6.0  # observed ~O(dz^3)


def test_face_closure_free_and_zero():
    p1, p2 = np.array(2.0), np.array(2.0)
    assert float(boundary_face_value(p1, p2, 1e-10, PolarizationBC("free"))) == pytest.approx(2.0)
    assert float(boundary_face_value(p1, p2, 1e-10, PolarizationBC("zero"))) == 0.0


def test_landau_density_wells():
    ps = FE.spontaneous_polarization()
    # well depth is negative and stationary: d f / dP = 0 at P_s
    h = 1e-6 * ps
    df = (landau_density(np.array(ps + h), FE.alpha, FE.beta, FE.gamma)
          - landau_density(np.array(ps - h), FE.alpha, FE.beta, FE.gamma)) / (2 * h)
    assert abs(df) < 1e-3 * abs(FE.alpha) * ps
    assert landau_density(np.array(ps), FE.alpha, FE.beta, FE.gamma) < 0.0


def test_rhs_matches_scalar_ode_for_uniform_state():
    """Uniform P, free BC, zero field: every FE cell sees the pointwise
    Landau force -Gamma*(alpha P + beta P^3 + gamma P^5)."""
    stack = _mfm_stack()
    p0 = 0.01
    P, phi = _uniform_state(stack, p0)
    rhs = tdgl_rhs(P, phi, stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi, FE, FREE)
    expected = -FE.Gamma_kinetic * (FE.alpha * p0 + FE.beta * p0**3 + FE.gamma * p0**5)
    np.testing.assert_allclose(rhs[stack.fe_mask], expected, rtol=1e-12)
    assert np.all(rhs[~stack.fe_mask] == 0.0)


def test_euler_step_matches_closed_form():
    stack = _mfm_stack()
    p0 = 0.01
    P, phi = _uniform_state(stack, p0)
    dt = 1e-13
    rhs = tdgl_rhs(P, phi, stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi, FE, FREE)
    P1 = step_euler(P, rhs, dt)
    f = -FE.Gamma_kinetic * (FE.alpha * p0 + FE.beta * p0**3 + FE.gamma * p0**5)
    np.testing.assert_allclose(P1.interior[stack.fe_mask], p0 + dt * f, rtol=1e-12)


def test_trapezoidal_is_second_order_on_scalar_ode():
    """Heun step vs high-accuracy reference for the uniform-cell ODE."""
    from scipy.integrate import solve_ivp

    stack = _mfm_stack()
    p0 = 0.01
    t_end = 4e-13

    def f(t, p):
        return -FE.Gamma_kinetic * (FE.alpha * p + FE.beta * p**3 + FE.gamma * p**5)

    ref = solve_ivp(f, (0, t_end), [p0], rtol=1e-12, atol=1e-18).y[0, -1]

    def integrate(n):
        dt = t_end / n
        P, phi = _uniform_state(stack, p0)
        for _ in range(n):
            r0 = tdgl_rhs(P, phi, stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi, FE, FREE)
            Ps = step_euler(P, r0, dt)
            r1 = tdgl_rhs(Ps, phi, stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi, FE, FREE)
            P = step_trapezoidal(P, r0, r1, dt)
        return P.interior[0, 0, 0]

    e1 = abs(integrate(4) - ref)
    e2 = abs(integrate(8) - ref)
    assert np.log2(e1 / e2) == pytest.approx(2.0, abs=0.2)


def test_lateral_laplacian_fourier_symbol():
    """P = A sin(kx x), uniform in z, free BC: the discrete rhs equals the
    pointwise Landau force plus g44 times the exact stencil symbol."""
    stack = _mfm_stack(nx=16)
    grid = stack.grid
    A = 1e-3
    kx = 2.0 * np.pi / grid.Lx
    x, _, _ = grid.meshgrid()
    P = ScalarField.zeros(grid)
    P.interior[...] = A * np.sin(kx * x)
    exchange_ghosts(P)
    phi = ScalarField.zeros(grid, ZRule.dirichlet(0.0, 0.0))
    exchange_ghosts(phi)
    rhs = tdgl_rhs(P, phi, stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi, FE, FREE)
    p = P.interior
    symbol = -(2.0 - 2.0 * np.cos(kx * grid.dx)) / grid.dx**2
    expected = -FE.Gamma_kinetic * (
        FE.alpha * p + FE.beta * p**3 + FE.gamma * p**5 - FE.g44 * symbol * p)
    np.testing.assert_allclose(rhs, expected, rtol=1e-10, atol=1e-4)


def test_rhs_parity():
    """The force is odd in P when the potential is zero."""
    stack = _mfm_stack()
    rng = np.random.default_rng(4)
    P = ScalarField.zeros(stack.grid)
    P.interior[...] = 0.01 * rng.normal(size=stack.grid.shape)
    exchange_ghosts(P)
    phi = ScalarField.zeros(stack.grid, ZRule.dirichlet(0.0, 0.0))
    exchange_ghosts(phi)
    neg = ScalarField.zeros(stack.grid)
    neg.interior[...] = -P.interior
    exchange_ghosts(neg)
    r = tdgl_rhs(P, phi, stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi, FE, SURF)
    rn = tdgl_rhs(neg, phi, stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi, FE, SURF)
    np.testing.assert_allclose(rn, -r, rtol=1e-12, atol=1e-20)


def test_y_uniform_states_stay_y_uniform():
    stack = _mfm_stack(nx=8, ny=6)
    rng = np.random.default_rng(9)
    profile = 0.01 * rng.normal(size=(stack.grid.nx, 1, stack.grid.nz))
    P = ScalarField.zeros(stack.grid)
    P.interior[...] = np.broadcast_to(profile, stack.grid.shape)
    exchange_ghosts(P)
    phi = ScalarField.zeros(stack.grid, ZRule.dirichlet(0.0, 0.0))
    exchange_ghosts(phi)
    rhs = tdgl_rhs(P, phi, stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi, FE, SURF)
    np.testing.assert_array_equal(rhs, np.broadcast_to(rhs[:, :1, :], rhs.shape))


def test_variational_consistency_with_frozen_potential():
    """(F(P + h dP) - F(P - h dP)) / 2h -> -<rhs/Gamma, dP> dV with
    second-order Richardson behavior in h."""
    stack = _mfm_stack(nx=6, ny=6, nz=8)
    grid = stack.grid
    rng = np.random.default_rng(11)
    P = ScalarField.zeros(grid)
    P.interior[...] = 0.02 * rng.normal(size=grid.shape)
    exchange_ghosts(P)
    phi = ScalarField.zeros(grid, ZRule.dirichlet(0.0, 0.3))
    phi.interior[...] = 0.3 * (np.arange(grid.nz) + 0.5) / grid.nz
    exchange_ghosts(phi)
    dP = rng.normal(size=grid.shape)

    bc = FREE  # free closure is exactly self-adjoint (see tdgl docstring)
    rhs = tdgl_rhs(P, phi, stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi, FE, bc)
    dV = grid.cell_volume
    exact = -np.sum(rhs / FE.Gamma_kinetic * dP) * dV

    def fd(h):
        Pp = ScalarField.zeros(grid)
        Pp.interior[...] = P.interior + h * dP
        exchange_ghosts(Pp)
        Pm = ScalarField.zeros(grid)
        Pm.interior[...] = P.interior - h * dP
        exchange_ghosts(Pm)
        fp = free_energy_frozen_potential(Pp, phi, stack.fe_mask, stack.fe_k_lo,
                                          stack.fe_k_hi, FE, bc)
        fm = free_energy_frozen_potential(Pm, phi, stack.fe_mask, stack.fe_k_lo,
                                          stack.fe_k_hi, FE, bc)
        return (fp - fm) / (2.0 * h)

    hs = [1e-3, 1e-4, 1e-5]
    errs = [abs(fd(h) - exact) for h in hs]
    rates = [np.log10(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    # central differences: error ~ h^2, i.e. 2 decades per decade in h
    for r in rates:
        assert r == pytest.approx(2.0, abs=0.3)


def test_energy_breakdown_uniform_state():
    stack = _mfm_stack()
    ps = FE.spontaneous_polarization()
    P, phi = _uniform_state(stack, ps)
    br = energy_breakdown(P, phi, stack.eps_field, stack.fe_mask,
                          stack.fe_k_lo, stack.fe_k_hi, FE, FREE)
    vol = stack.grid.Lx * stack.grid.Ly * stack.grid.Lz
    f_well = landau_density(np.array(ps), FE.alpha, FE.beta, FE.gamma)
    assert br.F_landau == pytest.approx(float(f_well) * vol, rel=1e-12)
    assert br.F_gradient == pytest.approx(0.0, abs=1e-18)
    assert br.F_electrostatic == pytest.approx(0.0, abs=1e-18)
    assert br.F_domain_wall == pytest.approx(0.0, abs=1e-18)
    assert br.F_total == pytest.approx(br.F_landau)
