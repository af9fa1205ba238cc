"""Carrier densities and free charge from the local potential.

Electron/hole densities follow Fermi-Dirac statistics through the complete
integral of order 1/2, F_{1/2}(eta) = (2/sqrt(pi)) * int_0^inf sqrt(x) /
(1 + exp(x - eta)) dx, normalized so F_{1/2} -> exp(eta) as eta -> -inf.
A Maxwell-Boltzmann path is selectable for the nondegenerate limit.

Energy reference: the Fermi level is the zero of energy and e*Phi shifts the
bands locally, i.e. the electron occupation argument is (e*Phi - E_c)/kT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import BOLTZMANN, ELEMENTARY_CHARGE, HBAR
from .grid import ScalarField, ZRule, exchange_ghosts

__all__ = ["ChargeModel", "fermi_half", "electron_density", "hole_density", "charge_density"]

ETA_CLAMP = 50.0   # Boltzmann-path clamp; far outside the device operating range
ETA_FLOOR = -700.0  # keeps exp(-eta) finite; F is ~1e-304 there anyway

_SQRT_PI = math.sqrt(math.pi)


def fermi_half(eta):
    """Closed-form approximation of F_{1/2} (Bednarczyk form, ~0.4% accurate).

    F_{1/2}(eta) ~= 1 / (exp(-eta) + (3/4)*sqrt(pi) * nu(eta)^(-3/8)), with
    nu = eta^4 + 50 + 33.6*eta*(1 - 0.68*exp(-0.17*(eta+1)^2)).
    """
    eta = np.maximum(eta, ETA_FLOOR)
    nu = eta**4 + 50.0 + 33.6 * eta * (1.0 - 0.68 * np.exp(-0.17 * (eta + 1.0) ** 2))
    return 1.0 / (np.exp(-eta) + 0.75 * _SQRT_PI * nu ** (-0.375))


@dataclass(frozen=True)
class ChargeModel:
    """Semiconductor parameters bundled with the physical constants."""

    params: "SemiconductorParams"
    e: float = ELEMENTARY_CHARGE
    k_B: float = BOLTZMANN
    hbar: float = HBAR

    @property
    def kT(self) -> float:
        return self.k_B * self.params.T

    def band_prefactor(self, mass: float) -> float:
        """Effective density of states N = (sqrt(pi)/2)*(2m kT)^{3/2}/(2 pi^2 hbar^3).

        Chosen so n = N * F_{1/2}(eta) reduces to N * exp(eta) in the
        Maxwell-Boltzmann limit (the standard N_c/N_v).
        """
        return (_SQRT_PI / 2.0) * (2.0 * mass * self.kT) ** 1.5 / (2.0 * math.pi**2 * self.hbar**3)

    @property
    def Nc(self) -> float:
        p = self.params
        return p.Nc if p.Nc is not None else self.band_prefactor(p.me_eff)

    @property
    def Nv(self) -> float:
        p = self.params
        return p.Nv if p.Nv is not None else self.band_prefactor(p.mp_eff)


def electron_density(phi, model: ChargeModel):
    """n_e(phi) in 1/m^3; strictly increasing in phi."""
    p = model.params
    eta = (model.e * np.asarray(phi, dtype=float) - p.Ec) / model.kT
    if p.statistics == "maxwell_boltzmann":
        return model.Nc * np.exp(np.clip(eta, -ETA_CLAMP, ETA_CLAMP))
    return model.Nc * fermi_half(eta)


def hole_density(phi, model: ChargeModel):
    """n_p(phi) in 1/m^3; strictly decreasing in phi."""
    p = model.params
    eta = (p.Ev - model.e * np.asarray(phi, dtype=float)) / model.kT
    if p.statistics == "maxwell_boltzmann":
        return model.Nv * np.exp(np.clip(eta, -ETA_CLAMP, ETA_CLAMP))
    return model.Nv * fermi_half(eta)


def charge_density(phi: ScalarField, model: ChargeModel, sc_mask: np.ndarray) -> ScalarField:
    """rho = e*(n_p - n_e + Nd+ - Na-) on semiconductor cells, zero elsewhere."""
    p = model.params
    out = ScalarField.zeros(phi.grid, ZRule.one_sided())
    if not np.any(sc_mask):
        return exchange_ghosts(out)
    v = phi.interior[sc_mask]
    rho = model.e * (hole_density(v, model) - electron_density(v, model)
                     + p.Nd_plus - p.Na_minus)
    out.interior[sc_mask] = rho
    return exchange_ghosts(out)
