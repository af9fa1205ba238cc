"""Command-line entry point.

    sim run    --config cfg.txt --out outdir [--seed N] [--threads N]
    sim sweep  --config cfg.txt --out outdir [--seed N] [--threads N]
    sim verify --suite {temporal1|temporal2|spatial|poisson|fermi} [--out dir]

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 NaN abort.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace
from pathlib import Path

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_NAN = 4

# acceptance bands per suite: quantity -> (lo, hi)
RATE_BANDS = {
    "temporal1": {"P": (0.85, 1.15), "Phi": (0.85, 1.15)},
    "temporal2": {"P": (1.8, 2.2), "Phi": (1.8, 2.2)},
    "spatial": {"P": (1.6, float("inf")), "Phi": (0.7, 1.3)},
}
SUITE_NAMES = {"temporal1": "temporal_order1", "temporal2": "temporal_order2",
               "spatial": "spatial"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("run", "sweep"):
        p = sub.add_parser(name, help=f"{name} a configured simulation")
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True,
                   choices=("temporal1", "temporal2", "spatial", "poisson", "fermi"))
    v.add_argument("--out", type=Path, default=None)
    v.add_argument("--grid", type=int, default=64,
                   help="medium grid (temporal/spatial suites)")
    v.add_argument("--dt", type=float, default=5.0e-14,
                   help="coarse time step in seconds")
    v.add_argument("--full", action="store_true",
                   help="full-scale spatial ladder (128 medium grid)")
    v.add_argument("--threads", type=int, default=None)
    return parser


def _run_cmd(args) -> int:
    from .driver import run
    from .materials import ConfigError, parse_config

    try:
        text = args.config.read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)

    def progress(v, rec):
        print(f"v_app={v:+.4f} V  Q={rec.Q_uC_per_cm2:+.4f} uC/cm^2  "
              f"P_mean={rec.P_mean_C_per_m2:+.5f} C/m^2  "
              f"{'settled' if rec.settled else 'UNSETTLED'}")

    from .coupling import SolverDiverged
    from .poisson import PoissonConvergenceError
    try:
        result = run(cfg, out_dir=args.out, progress=progress)
    except PoissonConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except SolverDiverged as exc:
        print(f"NaN abort: {exc}", file=sys.stderr)
        return EXIT_NAN
    print(f"wrote {result.csv_path} ({len(result.records)} records, "
          f"{len(result.snapshot_paths)} snapshots)")
    return EXIT_OK


def _verify_cmd(args) -> int:
    from . import verification as ver

    if args.suite == "poisson":
        errors, cycles = ver.poisson_manufactured_errors()
        rates = [math.log2(a / b) for a, b in zip(errors[:-1], errors[1:])]
        ok = all(abs(r - 2.0) <= 0.1 for r in rates) and all(c <= 30 for c in cycles)
        for n, e, c in zip((32, 64, 128), errors, cycles):
            print(f"n={n:4d}  L2 error={e:.6e}  V-cycles={c}")
        for r in rates:
            print(f"{'PASS' if abs(r - 2.0) <= 0.1 else 'FAIL'}: rate {r:.3f} (band 2.0 +/- 0.1)")
        return EXIT_OK if ok else EXIT_SOLVER

    if args.suite == "fermi":
        rel, mb = ver.fermi_accuracy()
        ok = rel <= 0.005 and mb <= 0.01
        print(f"{'PASS' if rel <= 0.005 else 'FAIL'}: max rel error vs quadrature {rel:.4%} (<= 0.5%)")
        print(f"{'PASS' if mb <= 0.01 else 'FAIL'}: Boltzmann-limit deviation {mb:.4%} (<= 1%)")
        return EXIT_OK if ok else EXIT_SOLVER

    suite = SUITE_NAMES[args.suite]
    n_grid = 128 if (args.full and args.suite == "spatial") else args.grid
    results = ver.run_suite(suite, n_grid=n_grid, base_dt=args.dt)
    bands = RATE_BANDS[args.suite]
    print(f"{'quantity':8s}  {'E_cm':>12s}  {'E_mf':>12s}  {'rate':>6s}")
    ok = True
    rows = []
    for res in results:
        lo, hi = bands[res.quantity]
        good = lo <= res.rate <= hi
        ok = ok and good
        print(f"{res.quantity:8s}  {res.E_cm:12.5e}  {res.E_mf:12.5e}  {res.rate:6.3f}"
              f"  {'PASS' if good else 'FAIL'}")
        rows.append((suite, res.quantity, res.E_cm, res.E_mf, res.rate))
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / f"verify_{args.suite}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("suite", "quantity", "E_cm", "E_mf", "rate"))
            w.writerows(rows)
        print(f"wrote {path}")
    return EXIT_OK if ok else EXIT_SOLVER


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads is not None:
        from . import kernels
        kernels.set_num_threads(args.threads)
    if args.command in ("run", "sweep"):
        return _run_cmd(args)
    return _verify_cmd(args)


if __name__ == "__main__":
    sys.exit(main())
