"""Self-consistent coupling of polarization, potential, and mobile charge.

Each step solves the Poisson problem with the charge density lagged on the
previous potential iterate, repeating until the potential stops moving
(mean absolute update below tol, in volts).  Stacks without a semiconductor
have a linear Poisson problem and converge in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, ScalarField, ZRule, exchange_ghosts
from .materials import DeviceStack, SimConfig
from .poisson import MultigridConfig, MultigridSolver, PoissonProblem, assemble_rhs
from .semiconductor import ChargeModel, charge_density

__all__ = ["SimState", "FixedPointReport", "SolverDiverged",
           "self_consistent_phi", "initialize", "advance", "initial_polarization"]


class SolverDiverged(RuntimeError):
    """A field became non-finite during the update."""


@dataclass(frozen=True)
class FixedPointReport:
    iterations: int
    update_norm: float       # mean |delta phi| of the last pass, volts
    converged: bool
    vcycles_total: int


@dataclass
class SimState:
    P: ScalarField
    phi: ScalarField
    t: float
    step: int
    v_app: float
    last_report: FixedPointReport | None = None


def _charge(phi: ScalarField, stack: DeviceStack, model: ChargeModel | None) -> ScalarField:
    if model is None:
        return ScalarField.zeros(stack.grid, ZRule.one_sided())
    return charge_density(phi, model, stack.sc_mask)


def self_consistent_phi(P: ScalarField, stack: DeviceStack, v_app: float,
                        solver: MultigridSolver, model: ChargeModel | None,
                        phi_guess: ScalarField | None = None,
                        tol: float = 1e-5, max_iters: int = 100,
                        poisson_tol: float = 1e-10) -> tuple[ScalarField, FixedPointReport]:
    """Fixed-point iteration on phi with the charge density lagged.

    The applied voltage lands on the top contact (z = Lz); the bottom contact
    is grounded.
    """
    grid = stack.grid
    zr = ZRule.dirichlet(0.0, v_app)
    phi = phi_guess if phi_guess is not None else ScalarField.zeros(grid, zr)
    if phi_guess is not None and phi.z_rule.kind == "dirichlet" and phi.z_rule != zr:
        # re-tag the boundary values; interior data is only a starting guess
        phi = ScalarField(grid, phi.data.copy(), zr)
    vcycles = 0
    linear = model is None or not stack.has_semiconductor
    iters_cap = 1 if linear else max_iters
    update = np.inf
    it = 0
    for it in range(1, iters_cap + 1):
        rho = _charge(phi, stack, model if stack.has_semiconductor else None)
        rhs = assemble_rhs(P, rho, stack)
        problem = PoissonProblem(stack.eps_field, rhs, 0.0, v_app, tol=poisson_tol)
        new_phi, rep = solver.solve(problem, phi_guess=phi)
        vcycles += rep.cycles
        update = float(np.mean(np.abs(new_phi.interior - phi.interior)))
        phi = new_phi
        if linear or update <= tol:
            break
    if not np.all(np.isfinite(phi.interior)):
        raise SolverDiverged("potential became non-finite in the field iteration")
    converged = linear or update <= tol
    return phi, FixedPointReport(iterations=it, update_norm=update,
                                 converged=converged, vcycles_total=vcycles)


def initial_polarization(cfg: SimConfig, stack: DeviceStack) -> ScalarField:
    """Seeded initial P on the ferroelectric cells (zero elsewhere)."""
    grid = stack.grid
    P = ScalarField.zeros(grid, ZRule.one_sided())
    interior = P.interior
    if cfg.init_kind == "random":
        rng = np.random.Generator(np.random.Philox(cfg.seed))
        noise = rng.uniform(-cfg.init_amplitude, cfg.init_amplitude, size=grid.shape)
        interior[stack.fe_mask] = noise[stack.fe_mask]
    elif cfg.init_kind == "uniform_value":
        interior[stack.fe_mask] = cfg.init_value
    elif cfg.init_kind == "gaussian_bump":
        x, y, z = grid.meshgrid()
        z0 = cfg.init_z0 if cfg.init_z0 is not None else \
            0.5 * (stack.fe_k_lo + stack.fe_k_hi) * grid.dz
        bump = cfg.init_amplitude * np.exp(
            -((x - 0.5 * grid.Lx) ** 2 + (y - 0.5 * grid.Ly) ** 2) / (2.0 * cfg.init_sigma1 ** 2)
            - (z - z0) ** 2 / (2.0 * cfg.init_sigma2 ** 2))
        interior[stack.fe_mask] = bump[stack.fe_mask]
    elif cfg.init_kind == "stripe":
        width = cfg.init_stripe_width if cfg.init_stripe_width is not None else 0.5 * grid.Lx
        x, _, _ = grid.meshgrid()
        stripe = np.where((x % grid.Lx) < width, cfg.init_value, -cfg.init_value)
        interior[stack.fe_mask] = stripe[stack.fe_mask]
    exchange_ghosts(P)
    return P


def initialize(cfg: SimConfig, stack: DeviceStack, solver: MultigridSolver,
               model: ChargeModel | None, v_app: float = 0.0) -> SimState:
    P = initial_polarization(cfg, stack)
    phi, report = self_consistent_phi(
        P, stack, v_app, solver, model, phi_guess=None,
        tol=cfg.fixedpoint_tol, max_iters=cfg.fixedpoint_max_iters,
        poisson_tol=cfg.poisson_tol)
    return SimState(P=P, phi=phi, t=0.0, step=0, v_app=v_app, last_report=report)


def advance(state: SimState, stack: DeviceStack, solver: MultigridSolver,
            model: ChargeModel | None, cfg: SimConfig,
            v_app: float | None = None, dt: float | None = None) -> SimState:
    """One step: explicit Euler (order 1) or Heun/trapezoidal (order 2).

    Each polarization update is followed by a self-consistent potential
    solve so the corrector sees the field of the predicted state.
    """
    from .tdgl import step_euler, step_trapezoidal, tdgl_rhs

    dt = cfg.dt if dt is None else dt
    v = state.v_app if v_app is None else v_app
    if not np.all(np.isfinite(state.P.interior)):
        raise SolverDiverged(f"polarization is non-finite entering step {state.step + 1}")
    fe = stack.fe_params
    bc = cfg.pol_bc

    def rhs_of(P, phi):
        return tdgl_rhs(P, phi, stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi, fe, bc)

    phi_n = state.phi
    if v != state.v_app:
        phi_n, _ = self_consistent_phi(
            state.P, stack, v, solver, model, phi_guess=state.phi,
            tol=cfg.fixedpoint_tol, max_iters=cfg.fixedpoint_max_iters,
            poisson_tol=cfg.poisson_tol)

    rhs_n = rhs_of(state.P, phi_n)
    if cfg.temporal_order == 1:
        P_new = step_euler(state.P, rhs_n, dt)
        report = None
    else:
        P_star = step_euler(state.P, rhs_n, dt)
        phi_star, _ = self_consistent_phi(
            P_star, stack, v, solver, model, phi_guess=phi_n,
            tol=cfg.fixedpoint_tol, max_iters=cfg.fixedpoint_max_iters,
            poisson_tol=cfg.poisson_tol)
        rhs_star = rhs_of(P_star, phi_star)
        P_new = step_trapezoidal(state.P, rhs_n, rhs_star, dt)

    if not np.all(np.isfinite(P_new.interior)):
        raise SolverDiverged(f"polarization became non-finite at step {state.step + 1}")
    phi_new, report = self_consistent_phi(
        P_new, stack, v, solver, model,
        phi_guess=phi_star if cfg.temporal_order == 2 else phi_n,
        tol=cfg.fixedpoint_tol, max_iters=cfg.fixedpoint_max_iters,
        poisson_tol=cfg.poisson_tol)
    return SimState(P=P_new, phi=phi_new, t=state.t + dt, step=state.step + 1,
                    v_app=v, last_report=report)
