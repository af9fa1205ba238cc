"""Relaxational (gradient-flow) dynamics of the out-of-plane polarization.

P lives on the same cell centers as the potential and is identically zero
outside the ferroelectric layer.  Inside the layer the evolution is

    dP/dt = -Gamma * ( alpha P + beta P^3 + gamma P^5
                       - g44 (P_xx + P_yy) - g11 P_zz + dPhi/dz )

with periodic lateral boundaries.  At the two z-faces of the layer the
second derivative needs a closure; three variants are supported through
`PolarizationBC`:

  * ``surface_effect``: lambda * dP/dz = P at the face (extrapolation length)
  * ``free``:           dP/dz = 0 at the face
  * ``zero``:           P = 0 at the face

The face is half a cell away from the boundary cell center, so a quadratic
through (face, cell 1, cell 2) is used.  With s = +1 at the lower face and
s = -1 at the upper face (outward direction = -s z_hat at the lower face):

    P_face (surface_effect, lower) solves  lambda * s * dP/dz|_face = -P_face
    one-sided first derivative:  dP/dz|_face = s (8/3 P_f - 3 P_1 + P_2/3)/dz
      => P_f = lambda (9 P_1 - P_2) / (8 lambda + 3 dz)   [outward-normal form]
    boundary-cell second derivative: (4/3)(2 P_f - 3 P_1 + P_2) / dz^2
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, ScalarField, ZRule, exchange_ghosts, volume_integral

__all__ = [
    "PolarizationBC",
    "EnergyBreakdown",
    "boundary_face_value",
    "apply_polarization_bc",
    "landau_density",
    "tdgl_rhs",
    "step_euler",
    "step_trapezoidal",
    "energy_breakdown",
    "free_energy_frozen_potential",
]


@dataclass(frozen=True)
class PolarizationBC:
    kind: str                  # "surface_effect" | "free" | "zero"
    lam: float | None = None   # extrapolation length, surface_effect only

    def __post_init__(self):
        if self.kind not in ("surface_effect", "free", "zero"):
            raise ValueError(f"unknown polarization BC {self.kind!r}")
        if self.kind == "surface_effect":
            if self.lam is None or self.lam <= 0:
                raise ValueError("surface_effect BC needs a positive extrapolation length")
        elif self.lam is not None:
            raise ValueError(f"extrapolation length is meaningless for {self.kind!r} BC")


def boundary_face_value(p1: np.ndarray, p2: np.ndarray, dz: float,
                        bc: PolarizationBC) -> np.ndarray:
    """Face value of P from the two nearest cell values (quadratic closure).

    p1 is the boundary cell (center at dz/2 from the face), p2 the next one in.
    The surface-effect condition is written with the outward normal, so the
    same formula serves both faces of the layer.
    """
    if bc.kind == "zero":
        return np.zeros_like(p1)
    if bc.kind == "free":
        return (9.0 * p1 - p2) / 8.0
    lam = bc.lam
    return lam * (9.0 * p1 - p2) / (8.0 * lam + 3.0 * dz)


def apply_polarization_bc(P: ScalarField, fe_k_lo: int, fe_k_hi: int,
                          bc: PolarizationBC) -> None:
    """Refresh lateral ghosts. z ghosts are unused (one-sided closures)."""
    exchange_ghosts(P)


def landau_density(P: np.ndarray, alpha: float, beta: float, gamma: float) -> np.ndarray:
    p2 = P * P
    return p2 * (0.5 * alpha + p2 * (0.25 * beta + p2 * (gamma / 6.0)))


def _laplacian_terms(P: ScalarField, fe_k_lo: int, fe_k_hi: int,
                     bc: PolarizationBC) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(P_xx, P_yy, P_zz) on interior cells; z closure applied on the FE faces.

    Outside the FE layer P == 0 so the plain central stencil is harmless for
    x/y; P_zz uses central differences on the interior of the layer and the
    one-sided boundary-cell formula at its first and last cell rows.
    """
    g = P.grid
    d = P.data
    c = d[1:-1, 1:-1, 1:-1]
    pxx = (d[2:, 1:-1, 1:-1] - 2.0 * c + d[:-2, 1:-1, 1:-1]) / g.dx**2
    pyy = (d[1:-1, 2:, 1:-1] - 2.0 * c + d[1:-1, :-2, 1:-1]) / g.dy**2
    pzz = (d[1:-1, 1:-1, 2:] - 2.0 * c + d[1:-1, 1:-1, :-2]) / g.dz**2

    dz2 = g.dz**2
    klo, khi = fe_k_lo, fe_k_hi
    # lower face of the layer
    p1, p2 = c[:, :, klo], c[:, :, klo + 1]
    pf = boundary_face_value(p1, p2, g.dz, bc)
    pzz[:, :, klo] = (4.0 / 3.0) * (2.0 * pf - 3.0 * p1 + p2) / dz2
    # upper face
    p1, p2 = c[:, :, khi - 1], c[:, :, khi - 2]
    pf = boundary_face_value(p1, p2, g.dz, bc)
    pzz[:, :, khi - 1] = (4.0 / 3.0) * (2.0 * pf - 3.0 * p1 + p2) / dz2
    return pxx, pyy, pzz


def tdgl_rhs(P: ScalarField, phi: ScalarField, fe_mask: np.ndarray,
             fe_k_lo: int, fe_k_hi: int, params, bc: PolarizationBC) -> np.ndarray:
    """dP/dt on interior cells (zero outside the ferroelectric layer).

    `params` carries alpha/beta/gamma/g11/g44/Gamma_kinetic.
    """
    g = P.grid
    pxx, pyy, pzz = _laplacian_terms(P, fe_k_lo, fe_k_hi, bc)
    c = P.data[1:-1, 1:-1, 1:-1]
    dphidz = (phi.data[1:-1, 1:-1, 2:] - phi.data[1:-1, 1:-1, :-2]) / (2.0 * g.dz)
    p2 = c * c
    bulk = c * (params.alpha + p2 * (params.beta + p2 * params.gamma))
    rhs = -params.Gamma_kinetic * (
        bulk - params.g44 * (pxx + pyy) - params.g11 * pzz + dphidz)
    return np.where(fe_mask, rhs, 0.0)


def step_euler(P: ScalarField, rhs: np.ndarray, dt: float) -> ScalarField:
    out = ScalarField.zeros(P.grid, P.z_rule)
    out.interior[...] = P.interior + dt * rhs
    exchange_ghosts(out)
    return out


def step_trapezoidal(P: ScalarField, rhs_n: np.ndarray, rhs_star: np.ndarray,
                     dt: float) -> ScalarField:
    out = ScalarField.zeros(P.grid, P.z_rule)
    out.interior[...] = P.interior + 0.5 * dt * (rhs_n + rhs_star)
    exchange_ghosts(out)
    return out


@dataclass(frozen=True)
class EnergyBreakdown:
    F_landau: float
    F_gradient: float
    F_electrostatic: float
    F_domain_wall: float

    @property
    def F_total(self) -> float:
        return self.F_landau + self.F_gradient + self.F_electrostatic


def _gradients(P: ScalarField, fe_k_lo: int, fe_k_hi: int,
               bc: PolarizationBC) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cell-centered (dP/dx, dP/dy, dP/dz) with one-sided z rows in the layer."""
    g = P.grid
    d = P.data
    px = (d[2:, 1:-1, 1:-1] - d[:-2, 1:-1, 1:-1]) / (2.0 * g.dx)
    py = (d[1:-1, 2:, 1:-1] - d[1:-1, :-2, 1:-1]) / (2.0 * g.dy)
    pz = (d[1:-1, 1:-1, 2:] - d[1:-1, 1:-1, :-2]) / (2.0 * g.dz)
    c = d[1:-1, 1:-1, 1:-1]
    klo, khi = fe_k_lo, fe_k_hi
    p1, p2 = c[:, :, klo], c[:, :, klo + 1]
    pf = boundary_face_value(p1, p2, g.dz, bc)
    # derivative at the lower boundary cell center from (face, cell1, cell2)
    pz[:, :, klo] = (-4.0 * pf + 3.0 * p1 + p2) / (3.0 * g.dz)
    p1, p2 = c[:, :, khi - 1], c[:, :, khi - 2]
    pf = boundary_face_value(p1, p2, g.dz, bc)
    pz[:, :, khi - 1] = ((4.0 * pf - 3.0 * p1) - p2) / (3.0 * g.dz)
    return px, py, pz


def energy_breakdown(P: ScalarField, phi: ScalarField, eps_field: ScalarField,
                     fe_mask: np.ndarray, fe_k_lo: int, fe_k_hi: int,
                     params, bc: PolarizationBC) -> EnergyBreakdown:
    """Volume-integrated free-energy contributions.

    F_electrostatic integrates E_z * P; F_domain_wall additionally collects
    the in-plane field energy and the lateral P-gradient energy, which is the
    quantity used to price 180-degree wall area.
    """
    from .poisson import electric_field

    g = P.grid
    dV = g.dx * g.dy * g.dz
    c = P.interior
    f_land = np.where(fe_mask, landau_density(c, params.alpha, params.beta, params.gamma), 0.0)
    px, py, pz = _gradients(P, fe_k_lo, fe_k_hi, bc)
    f_grad = np.where(
        fe_mask,
        0.5 * (params.g44 * (px * px + py * py) + params.g11 * pz * pz), 0.0)
    ex_f, ey_f, ez_f = electric_field(phi)
    ex, ey, ez = ex_f.interior, ey_f.interior, ez_f.interior
    f_elec = ez * c          # nonzero only where P is
    f_dw = eps_field.interior * (ex * ex + ey * ey) + np.where(
        fe_mask, 0.5 * params.g44 * (px * px + py * py), 0.0)
    return EnergyBreakdown(
        F_landau=float(np.sum(f_land)) * dV,
        F_gradient=float(np.sum(f_grad)) * dV,
        F_electrostatic=float(np.sum(f_elec)) * dV,
        F_domain_wall=float(np.sum(f_dw)) * dV,
    )


def free_energy_frozen_potential(P: ScalarField, phi: ScalarField,
                                 fe_mask: np.ndarray, fe_k_lo: int, fe_k_hi: int,
                                 params, bc: PolarizationBC) -> float:
    """F[P; phi] = int f_landau + f_gradient + (dPhi/dz) P  with phi held fixed.

    The gradient energy here is the compact face-difference quadratic form,
    i.e. the discrete antiderivative of the Laplacian stencils in tdgl_rhs:
    its directional derivative equals -<rhs/Gamma, dP> exactly for the free
    closure (lateral terms and interior z faces are symmetric stencils).
    For the surface-effect closure the layer faces add (g11/2lam) P_f^2 per
    unit area; the quadratic boundary closure is not exactly self-adjoint, so
    that pairing holds to O(dz) in the two boundary rows.
    """
    g = P.grid
    dV = g.dx * g.dy * g.dz
    c = P.interior
    f_land = np.where(fe_mask, landau_density(c, params.alpha, params.beta, params.gamma), 0.0)
    total = float(np.sum(f_land)) * dV

    d = P.data
    dxp = (d[2:, 1:-1, 1:-1] - c) / g.dx         # east faces (periodic)
    dyp = (d[1:-1, 2:, 1:-1] - c) / g.dy
    total += 0.5 * params.g44 * (float(np.sum(dxp * dxp)) + float(np.sum(dyp * dyp))) * dV
    klo, khi = fe_k_lo, fe_k_hi
    dzp = (c[:, :, klo + 1:khi] - c[:, :, klo:khi - 1]) / g.dz  # interior z faces
    total += 0.5 * params.g11 * float(np.sum(dzp * dzp)) * dV
    if bc.kind == "surface_effect":
        dA = g.dx * g.dy
        for p1, p2 in ((c[:, :, klo], c[:, :, klo + 1]),
                       (c[:, :, khi - 1], c[:, :, khi - 2])):
            pf = boundary_face_value(p1, p2, g.dz, bc)
            total += (0.5 * params.g11 / bc.lam) * float(np.sum(pf * pf)) * dA

    dphidz = (phi.data[1:-1, 1:-1, 2:] - phi.data[1:-1, 1:-1, :-2]) / (2.0 * g.dz)
    total += float(np.sum(dphidz * c)) * dV
    return total
