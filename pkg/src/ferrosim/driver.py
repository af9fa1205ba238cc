"""Run orchestration: voltage schedules, steady-state detection, the
Results-section diagnostics (interface charge, layer voltages, depolarization
field, domain-wall energy), and output persistence.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constants import EPS0
from .coupling import SimState, advance, initialize
from .grid import ScalarField, plane_average
from .io import SweepRecord, vtk_filename, write_csv, write_vtk
from .materials import DeviceStack, SimConfig
from .poisson import MultigridSolver, electric_field
from .semiconductor import ChargeModel, charge_density
from .tdgl import energy_breakdown

__all__ = ["interface_charge", "average_fe_voltage", "interface_voltage",
           "depolarization_field", "domain_wall_energy", "RunResult", "run"]

SNAPSHOT_FIELDS = ("P", "Phi", "rho", "Ez")


def interface_voltage(phi: ScalarField, stack: DeviceStack) -> float:
    """Plane average of Phi on the dielectric-side cell layer at the FE-DE
    interface (one half-cell below the interface plane)."""
    k = _interface_k(stack)
    return plane_average(phi, k)


def _interface_k(stack: DeviceStack) -> int:
    if stack.z_int_fe_de is None:
        raise ValueError("stack has no layer below the ferroelectric")
    k = stack.z_int_fe_de - 1
    if not stack.de_mask[0, 0, k]:
        raise ValueError("no dielectric layer adjacent below the ferroelectric")
    return k


def interface_charge(phi: ScalarField, stack: DeviceStack) -> float:
    """Plane-averaged eps0*eps_DE*E_z at the FE-DE interface, dielectric side.

    E_z comes from a one-sided difference over the two dielectric cells
    nearest the interface.
    """
    k = _interface_k(stack)
    if k < 1 or not stack.de_mask[0, 0, k - 1]:
        raise ValueError("need two dielectric cells below the interface")
    eps_de = stack.de_eps_below_fe()
    phi1 = plane_average(phi, k)       # half a cell below the interface
    phi2 = plane_average(phi, k - 1)
    e_z = -(phi1 - phi2) / stack.grid.dz
    return EPS0 * eps_de * e_z


def average_fe_voltage(phi: ScalarField, v_app: float, stack: DeviceStack) -> float:
    """V_fe = v_app minus the interface-plane average of Phi."""
    return v_app - interface_voltage(phi, stack)


def depolarization_field(p_bar: float, stack: DeviceStack) -> float:
    """Closed-form mean depolarization field of a uniformly poled FE-on-DE
    bilayer with grounded contacts: E = -P / [eps0 (eps_fe + eps_DE t_fe/t_DE)].

    Diagnostic only; the dynamics never use it.
    """
    eps_de = stack.de_eps_below_fe()
    t_fe = (stack.fe_k_hi - stack.fe_k_lo) * stack.grid.dz
    t_de = 0.0
    for kind, klo, khi in stack.z_ranges:
        if kind == "dielectric" and khi == stack.fe_k_lo:
            t_de = (khi - klo) * stack.grid.dz
    if t_de == 0.0:
        raise ValueError("no dielectric layer adjacent below the ferroelectric")
    return -p_bar / (EPS0 * (stack.fe_params.eps_fe + eps_de * t_fe / t_de))


def domain_wall_energy(P: ScalarField, phi: ScalarField, stack: DeviceStack) -> ScalarField:
    """Domain-wall energy density over FE cells:
    eps0 eps_x E_x^2 + eps0 eps_y E_y^2 + (g44/2)[(dP/dx)^2 + (dP/dy)^2]."""
    g = P.grid
    fe = stack.fe_params
    ex, ey, _ = electric_field(phi)
    d = P.data
    px = (d[2:, 1:-1, 1:-1] - d[:-2, 1:-1, 1:-1]) / (2.0 * g.dx)
    py = (d[1:-1, 2:, 1:-1] - d[1:-1, :-2, 1:-1]) / (2.0 * g.dy)
    dens = (stack.eps_field.interior * (ex.interior ** 2 + ey.interior ** 2)
            + 0.5 * fe.g44 * (px * px + py * py))
    out = ScalarField.zeros(g)
    out.interior[stack.fe_mask] = dens[stack.fe_mask]
    return out


@dataclass
class RunResult:
    records: list
    final_state: SimState
    csv_path: Path | None
    snapshot_paths: list


def _record(state: SimState, stack: DeviceStack, cfg: SimConfig,
            settled: bool) -> SweepRecord:
    fe = stack.fe_params
    breakdown = energy_breakdown(state.P, state.phi, stack.eps_field,
                                 stack.fe_mask, stack.fe_k_lo, stack.fe_k_hi,
                                 fe, cfg.pol_bc)
    p_mean = float(np.mean(state.P.interior[stack.fe_mask]))
    rep = state.last_report
    return SweepRecord(
        step=state.step, t_s=state.t, v_app_V=state.v_app,
        Q_C_per_m2=interface_charge(state.phi, stack),
        v_fe_avg_V=average_fe_voltage(state.phi, state.v_app, stack),
        v_int_avg_V=interface_voltage(state.phi, stack),
        F_total_J=breakdown.F_total, P_mean_C_per_m2=p_mean,
        fp_iters=rep.iterations if rep is not None else 0,
        settled=settled)


def _snapshot(state: SimState, stack: DeviceStack, model, out_dir: Path) -> list:
    paths = []
    _, _, ez = electric_field(state.phi)
    rho = charge_density(state.phi, model, stack.sc_mask) if model is not None \
        else ScalarField.zeros(stack.grid)
    fields = {"P": state.P, "Phi": state.phi, "rho": rho, "Ez": ez}
    for name in SNAPSHOT_FIELDS:
        fn = out_dir / vtk_filename(name, state.v_app, state.step)
        paths.append(write_vtk(fn, name, fields[name].interior, stack.grid))
    return paths


def _settle(state: SimState, stack: DeviceStack, solver, model,
            cfg: SimConfig, v_app: float, records: list) -> tuple[SimState, bool]:
    """Advance at fixed v_app until the steady-state rule fires; optionally
    record intermediate rows every cfg.record_every steps."""
    rule = cfg.sweep.settle
    streak = 0
    for n in range(1, rule.max_steps + 1):
        prev = state.P.interior.copy()
        state = advance(state, stack, solver, model, cfg, v_app=v_app)
        scale = max(float(np.max(np.abs(state.P.interior))), rule.floor)
        change = float(np.max(np.abs(state.P.interior - prev))) / scale
        streak = streak + 1 if change < rule.rel_change_tol else 0
        if streak >= rule.consecutive_steps:
            return state, True
        if cfg.record_every and n % cfg.record_every == 0:
            records.append(_record(state, stack, cfg, settled=False))
    return state, False


def run(cfg: SimConfig, out_dir: Path | str | None = None,
        progress=None) -> RunResult:
    """Execute the configured schedule; settle each voltage point, record it,
    and dump snapshots at the configured checkpoint voltages."""
    out = Path(out_dir) if out_dir is not None else None
    stack = cfg.make_stack()
    solver = MultigridSolver(stack.grid, stack.eps_field)
    model = ChargeModel(stack.sc_params) if stack.has_semiconductor else None
    points = cfg.sweep.voltage_points()
    state = initialize(cfg, stack, solver, model, v_app=points[0])

    records, snaps = [], []
    checkpoints = set(cfg.checkpoint_vapps)
    for v in points:
        state, settled = _settle(state, stack, solver, model, cfg, v, records)
        records.append(_record(state, stack, cfg, settled))
        if out is not None and any(abs(v - c) < 1e-12 for c in checkpoints):
            snaps.extend(_snapshot(state, stack, model, out))
        if progress is not None:
            progress(v, records[-1])

    csv_path = None
    if out is not None:
        csv_path = write_csv(out / "sweep.csv", records)
    return RunResult(records=records, final_state=state,
                     csv_path=csv_path, snapshot_paths=snaps)
