#!/usr/bin/env python3
"""Quasi-static triangular Q-V sweep of an MFIM stack (double hysteresis).

Each voltage point is relaxed to steady state before moving on, so the loop
reflects the energy landscape rather than the sweep rate. Expect hours at the
default resolution on a single core.

Usage: python scripts/run_hysteresis.py [out_dir] [--vmax 4.0] [--points 16]
"""

import argparse
import sys
import time
from pathlib import Path

from ferrosim.driver import run
from ferrosim.materials import Layer, SimConfig
from ferrosim.schedule import SteadyStateRule, SweepSchedule


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir", nargs="?", default="runs/hysteresis", type=Path)
    ap.add_argument("--vmax", type=float, default=4.0)
    ap.add_argument("--points", type=int, default=16,
                    help="voltage points per quarter cycle")
    ap.add_argument("--cycles", type=int, default=2)
    ap.add_argument("--lateral-nm", type=float, default=16.0)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    n_lat = int(round(args.lateral_nm * 2))
    cfg = SimConfig(
        nx=n_lat, ny=n_lat, nz=18, dx=0.5e-9, dy=0.5e-9, dz=0.5e-9,
        layers=(Layer("dielectric", 4e-9, 10.0),
                Layer("ferroelectric", 5e-9, 24.0)),
        seed=args.seed, init_kind="random", init_amplitude=0.002,
        sweep=SweepSchedule(waveform="triangular", vmax=args.vmax,
                            n_points_per_quarter=args.points,
                            cycles=args.cycles,
                            settle=SteadyStateRule(rel_change_tol=1e-5,
                                                   consecutive_steps=20,
                                                   max_steps=20000)),
        checkpoint_vapps=(0.0, args.vmax, -args.vmax),
    )
    t0 = time.perf_counter()
    result = run(cfg, out_dir=args.out_dir,
                 progress=lambda v, rec: print(
                     f"v_app={v:+.3f} V  Q={rec.Q_uC_per_cm2:+.3f} uC/cm^2  "
                     f"settled={rec.settled}", flush=True))
    print(f"{len(result.records)} sweep points in {time.perf_counter() - t0:.0f} s")
    print(f"artifacts in {args.out_dir}; plot with: analyze qv {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
