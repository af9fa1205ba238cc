import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from ferrosim.constants import BOLTZMANN, ELECTRON_MASS, ELEMENTARY_CHARGE
from ferrosim.grid import ScalarField, create_grid, exchange_ghosts
from ferrosim.materials import Layer, SemiconductorParams, build_stack
from ferrosim.semiconductor import (ChargeModel, charge_density,
                                    electron_density, fermi_half,
                                    hole_density)


def fermi_half_oracle(eta: float) -> float:
    """Normalized complete Fermi-Dirac integral of order 1/2 by quadrature."""
    val, _ = quad(lambda t: np.sqrt(t) / (1.0 + np.exp(t - eta)), 0.0, np.inf,
                  limit=200)
    return (2.0 / np.sqrt(np.pi)) * val


@pytest.mark.parametrize("eta", [-10.0, -5.0, -1.0, 0.0, 1.0, 5.0, 10.0, 20.0])
def test_fermi_half_against_quadrature(eta):
    assert fermi_half(eta) == pytest.approx(fermi_half_oracle(eta), rel=5e-3)


def test_fermi_half_boltzmann_tail():
    eta = np.linspace(-10.0, -8.0, 9)
    np.testing.assert_allclose(fermi_half(eta), np.exp(eta), rtol=1e-2)


def test_fermi_half_degenerate_tail():
    # F_{1/2}(eta) -> (4/(3 sqrt(pi))) eta^{3/2} for large eta
    eta = 20.0
    lead = 4.0 / (3.0 * np.sqrt(np.pi)) * eta ** 1.5
    assert fermi_half(eta) == pytest.approx(lead, rel=0.02)


@settings(max_examples=40, deadline=None)
@given(st.floats(-10.0, 19.9))
def test_fermi_half_monotone(eta):
    assert fermi_half(eta + 0.1) > fermi_half(eta)


@pytest.fixture
def model():
    return ChargeModel(SemiconductorParams())


def test_band_edge_densities_match_textbook(model):
    # 1.08 m_e at 300 K gives the standard N_c ~ 2.8e25 m^-3
    assert model.Nc == pytest.approx(2.8e25, rel=0.02)
    assert model.Nv == pytest.approx(model.band_prefactor(0.81 * ELECTRON_MASS))


def test_density_prefactor_formula(model):
    kT = BOLTZMANN * 300.0
    hbar = model.hbar
    expected = (np.sqrt(np.pi) / 2.0) * (2.0 * 1.08 * ELECTRON_MASS * kT) ** 1.5 \
        / (2.0 * np.pi**2 * hbar**3)
    assert model.Nc == pytest.approx(expected, rel=1e-12)


def test_neutrality_at_zero_potential(model):
    """With symmetric bands, n/p at phi = 0 reduces to Nc/Nv = (me/mp)^{3/2}
    (both tails are deep in the Boltzmann regime)."""
    n = electron_density(0.0, model)
    p = hole_density(0.0, model)
    assert n / p == pytest.approx((1.08 / 0.81) ** 1.5, rel=1e-3)


def test_electron_density_monotone_in_phi(model):
    phis = np.linspace(-1.0, 1.0, 21)
    n = electron_density(phis, model)
    p = hole_density(phis, model)
    assert np.all(np.diff(n) > 0)
    assert np.all(np.diff(p) < 0)


def test_boltzmann_statistics_path():
    mb = ChargeModel(SemiconductorParams(statistics="maxwell_boltzmann"))
    kT = BOLTZMANN * 300.0
    phi = 0.1
    eta = (ELEMENTARY_CHARGE * phi - mb.params.Ec) / kT
    assert electron_density(phi, mb) == pytest.approx(mb.Nc * np.exp(eta), rel=1e-12)


def test_fd_exceeds_mb_at_degeneracy():
    """Fermi statistics saturate below the Boltzmann exponential once the
    band edge is crossed."""
    fd = ChargeModel(SemiconductorParams())
    mb = ChargeModel(SemiconductorParams(statistics="maxwell_boltzmann"))
    phi = 0.8  # eta well above 0
    assert electron_density(phi, fd) < electron_density(phi, mb)


def test_charge_density_mask_and_doping():
    grid = create_grid(4, 4, 8, 0.5e-9, 0.5e-9, 0.5e-9)
    params = SemiconductorParams(Nd_plus=1e24)
    stack = build_stack(
        (Layer("semiconductor", 2.0e-9), Layer("dielectric", 1.0e-9, eps_rel=3.9),
         Layer("ferroelectric", 1.0e-9)),
        grid, sc_params=params)
    model = ChargeModel(params)
    phi = ScalarField.zeros(grid)
    rho = charge_density(phi, model, stack.sc_mask)
    assert np.all(rho.interior[~stack.sc_mask] == 0.0)
    inside = rho.interior[stack.sc_mask]
    n0 = electron_density(0.0, model)
    p0 = hole_density(0.0, model)
    expected = ELEMENTARY_CHARGE * (p0 - n0 + 1e24)
    np.testing.assert_allclose(inside, expected, rtol=1e-12)
