#!/usr/bin/env python3
"""Relax an MFISM stack (Si / SiO2 / HZO) at V_app = 0 and report the
potential and carrier profile at the dielectric-semiconductor interface.

Usage: python scripts/run_mfism.py [out_dir]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from ferrosim.driver import run
from ferrosim.materials import Layer, SemiconductorParams, SimConfig
from ferrosim.schedule import SteadyStateRule, SweepSchedule
from ferrosim.semiconductor import ChargeModel, electron_density, hole_density


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir", nargs="?", default="runs/mfism", type=Path)
    ap.add_argument("--lateral-nm", type=float, default=16.0)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    n_lat = int(round(args.lateral_nm * 2))
    cfg = SimConfig(
        nx=n_lat, ny=n_lat, nz=32, dx=0.5e-9, dy=0.5e-9, dz=0.5e-9,
        layers=(Layer("semiconductor", 10e-9, 11.7),
                Layer("dielectric", 1e-9, 3.9),
                Layer("ferroelectric", 5e-9, 24.0)),
        sc=SemiconductorParams(), seed=args.seed,
        init_kind="random", init_amplitude=0.002,
        sweep=SweepSchedule(waveform="hold", hold_v=0.0,
                            settle=SteadyStateRule(rel_change_tol=1e-6,
                                                   consecutive_steps=50,
                                                   max_steps=20000)),
        record_every=100, checkpoint_vapps=(0.0,),
    )
    t0 = time.perf_counter()
    result = run(cfg, out_dir=args.out_dir)
    state = result.final_state
    stack = cfg.make_stack()
    k_if = stack.z_ranges[0][2] - 1        # top Si cell layer
    phi_if = state.phi.interior[:, :, k_if]
    model = ChargeModel(stack.sc_params)
    n_e = electron_density(phi_if, model)
    n_p = hole_density(phi_if, model)
    print(f"settled after {state.step} steps in {time.perf_counter() - t0:.0f} s "
          f"(fixed point: {state.last_report.iterations} iterations)")
    print(f"interface potential: min {phi_if.min():+.4f} V, max {phi_if.max():+.4f} V")
    print(f"electron density spans {n_e.min():.3e}..{n_e.max():.3e} m^-3, "
          f"holes {n_p.min():.3e}..{n_p.max():.3e} m^-3")
    print(f"artifacts in {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
