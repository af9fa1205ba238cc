"""Refinement studies on a smooth Gaussian-bump problem.

The setup is a 32 nm cube: semiconductor quarter at the bottom, dielectric
quarter above it, ferroelectric half on top, grounded contacts on both z
faces.  The initial polarization is a small Gaussian bump whose support sits
well inside the ferroelectric layer, so no boundary closure pollutes the
interior error.

Each suite produces coarse/medium/fine solutions and reports, per quantity,

    E_cm = ||q_m - q_c||_2,   E_mf = ||q_f - q_m||_2,   rate = log2(E_cm/E_mf).

Temporal suites refine dt on one fixed grid; the spatial suite doubles the
grid at fixed dt and averages the finer solution down (8-cell means) before
differencing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import advance, initialize
from .grid import Grid, ScalarField, exchange_ghosts
from .materials import (DeviceStack, FerroelectricParams, Layer,
                        SemiconductorParams, SimConfig)
from .poisson import MultigridSolver
from .schedule import SweepSchedule
from .semiconductor import ChargeModel
from .tdgl import PolarizationBC

__all__ = ["BumpConfig", "ConvergenceResult", "gaussian_bump", "coarsen",
           "l2_error", "run_suite", "verification_config", "SUITES",
           "poisson_manufactured_errors", "fermi_accuracy"]

SIDE = 32.0e-9
T_FINAL = 4.0e-13
SUITES = ("temporal_order1", "temporal_order2", "spatial")


@dataclass(frozen=True)
class BumpConfig:
    sigma1: float = 5.0e-9
    sigma2: float = 2.0e-9
    z0: float = 24.0e-9
    amplitude: float = 0.002


@dataclass(frozen=True)
class ConvergenceResult:
    suite: str
    quantity: str            # "P" or "Phi"
    E_cm: float
    E_mf: float

    @property
    def rate(self) -> float:
        return float(np.log2(self.E_cm / self.E_mf))


def gaussian_bump(grid: Grid, cfg: BumpConfig, stack: DeviceStack) -> ScalarField:
    """Bump centered at the lateral domain midpoint, zero outside the FE mask.

    Raises if the 3-sigma support along z leaves the ferroelectric layer.
    """
    z_lo = stack.fe_k_lo * grid.dz
    z_hi = stack.fe_k_hi * grid.dz
    if cfg.z0 - 3.0 * cfg.sigma2 < z_lo or cfg.z0 + 3.0 * cfg.sigma2 > z_hi:
        raise ValueError("bump support extends outside the ferroelectric layer")
    x, y, z = grid.meshgrid()
    bump = cfg.amplitude * np.exp(
        -((x - 0.5 * grid.Lx) ** 2 + (y - 0.5 * grid.Ly) ** 2) / (2.0 * cfg.sigma1 ** 2)
        - (z - cfg.z0) ** 2 / (2.0 * cfg.sigma2 ** 2))
    P = ScalarField.zeros(grid)
    P.interior[stack.fe_mask] = bump[stack.fe_mask]
    return exchange_ghosts(P)


def coarsen(fine: np.ndarray) -> np.ndarray:
    """8-cell averages: (2n)^3 down to n^3. Odd dimensions are rejected."""
    nx, ny, nz = fine.shape
    if nx % 2 or ny % 2 or nz % 2:
        raise ValueError("coarsen needs even dimensions")
    return fine.reshape(nx // 2, 2, ny // 2, 2, nz // 2, 2).mean(axis=(1, 3, 5))


def l2_error(a: np.ndarray, b: np.ndarray) -> float:
    """sqrt((1/N) sum |a - b|^2)."""
    diff = np.asarray(a) - np.asarray(b)
    return float(np.sqrt(np.mean(diff * diff)))


def verification_config(n: int, dt: float, order: int,
                        bump: BumpConfig | None = None) -> SimConfig:
    """n^3 cube, SC/DE/FE = 25/25/50 % of the height bottom to top."""
    bump = bump or BumpConfig()
    h = SIDE / n
    layers = (
        Layer("semiconductor", 0.25 * SIDE),
        Layer("dielectric", 0.25 * SIDE, eps_rel=3.9),
        Layer("ferroelectric", 0.50 * SIDE),
    )
    return SimConfig(
        nx=n, ny=n, nz=n, dx=h, dy=h, dz=h, layers=layers,
        fe=FerroelectricParams(), sc=SemiconductorParams(),
        dt=dt, temporal_order=order,
        pol_bc=PolarizationBC("surface_effect", 3.0e-9),
        poisson_tol=1e-11, fixedpoint_tol=1e-8,
        sweep=SweepSchedule(waveform="hold", hold_v=0.0),
        init_kind="gaussian_bump", init_amplitude=bump.amplitude,
        init_sigma1=bump.sigma1, init_sigma2=bump.sigma2, init_z0=bump.z0,
    )


def _run(cfg: SimConfig, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    stack = cfg.make_stack()
    solver = MultigridSolver(stack.grid, stack.eps_field)
    model = ChargeModel(stack.sc_params) if stack.has_semiconductor else None
    state = initialize(cfg, stack, solver, model, v_app=0.0)
    for _ in range(n_steps):
        state = advance(state, stack, solver, model, cfg)
    return state.P.interior.copy(), state.phi.interior.copy()


def run_suite(suite: str, n_grid: int = 64, t_final: float = T_FINAL,
              base_dt: float = 5.0e-14) -> list[ConvergenceResult]:
    """Coarse/medium/fine study; returns one result for P and one for Phi."""
    if suite in ("temporal_order1", "temporal_order2"):
        order = 1 if suite.endswith("1") else 2
        dts = (base_dt, base_dt / 2.0, base_dt / 4.0)
        sols = [_run(verification_config(n_grid, dt, order), round(t_final / dt))
                for dt in dts]
        (Pc, Fc), (Pm, Fm), (Pf, Ff) = sols
        return [
            ConvergenceResult(suite, "P", l2_error(Pm, Pc), l2_error(Pf, Pm)),
            ConvergenceResult(suite, "Phi", l2_error(Fm, Fc), l2_error(Ff, Fm)),
        ]
    if suite == "spatial":
        ns = (n_grid // 2, n_grid, n_grid * 2)
        n_steps = round(t_final / base_dt)
        sols = [_run(verification_config(n, base_dt, 2), n_steps) for n in ns]
        (Pc, Fc), (Pm, Fm), (Pf, Ff) = sols
        return [
            ConvergenceResult(suite, "P",
                              l2_error(coarsen(Pm), Pc), l2_error(coarsen(Pf), Pm)),
            ConvergenceResult(suite, "Phi",
                              l2_error(coarsen(Fm), Fc), l2_error(coarsen(Ff), Fm)),
        ]
    raise ValueError(f"unknown suite {suite!r}")


def poisson_manufactured_errors(ns=(32, 64, 128), tol: float = 1e-10
                                ) -> tuple[list[float], list[int]]:
    """Manufactured-solution L2 errors and V-cycle counts on an n^3 ladder.

    Exact solution sin(kx x) cos(ky y) sin(kz z) with eps(z) = eps0 (2 + z/Lz);
    periodic laterally and zero on both z contacts, so the analytic source is
        rhs = -eps (kx^2+ky^2+kz^2) Phi + (eps0/Lz) kz sin cos cos(kz z).
    """
    from .constants import EPS0
    from .grid import create_grid
    from .poisson import MultigridSolver, PoissonProblem

    L = 32.0e-9
    errors, cycles = [], []
    for n in ns:
        h = L / n
        grid = create_grid(n, n, n, h, h, h)
        x, y, z = grid.meshgrid()
        kx, ky, kz = 2.0 * np.pi / L, 2.0 * np.pi / L, np.pi / L
        s = np.sin(kx * x) * np.cos(ky * y)
        exact = s * np.sin(kz * z)
        eps = ScalarField.zeros(grid)
        eps.interior[...] = EPS0 * (2.0 + z / L)
        exchange_ghosts(eps)
        rhs = ScalarField.zeros(grid)
        rhs.interior[...] = (-EPS0 * (2.0 + z / L) * (kx**2 + ky**2 + kz**2) * exact
                             + (EPS0 / L) * kz * s * np.cos(kz * z))
        exchange_ghosts(rhs)
        solver = MultigridSolver(grid, eps)
        phi, report = solver.solve(PoissonProblem(eps, rhs, 0.0, 0.0, tol=tol))
        errors.append(l2_error(phi.interior, exact))
        cycles.append(report.cycles)
    return errors, cycles


def fermi_accuracy(eta_min: float = -10.0, eta_max: float = 20.0,
                   n_points: int = 121) -> tuple[float, float]:
    """(max relative error vs the quadrature oracle over [eta_min, eta_max],
    max relative deviation from the Boltzmann limit for eta <= -8)."""
    from scipy.integrate import quad

    from .semiconductor import fermi_half

    def oracle(eta):
        val, _ = quad(lambda t: np.sqrt(t) / (1.0 + np.exp(t - eta)), 0.0, np.inf,
                      limit=200)
        return (2.0 / np.sqrt(np.pi)) * val

    etas = np.linspace(eta_min, eta_max, n_points)
    approx = fermi_half(etas)
    ref = np.array([oracle(e) for e in etas])
    rel = np.max(np.abs(approx - ref) / ref)
    mb_mask = etas <= -8.0
    mb = np.max(np.abs(approx[mb_mask] - np.exp(etas[mb_mask])) / np.exp(etas[mb_mask])) \
        if np.any(mb_mask) else 0.0
    return float(rel), float(mb)
