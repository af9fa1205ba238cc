"""Command line entry point: `analyze qv <run_dir>`, `analyze domains <run_dir>`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .artifacts import SchemaError, load_run
from .figures import plot_domains, plot_qv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="analyze",
                                     description="Plot simulator run artifacts")
    sub = parser.add_subparsers(dest="command", required=True)

    qv = sub.add_parser("qv", help="Q-V hysteresis panels from sweep.csv")
    qv.add_argument("run_dir", type=Path)
    qv.add_argument("--out", type=Path, default=None,
                    help="output basename (default <run_dir>/qv.png)")

    dom = sub.add_parser("domains", help="x-y heatmap of a snapshot field")
    dom.add_argument("run_dir", type=Path)
    dom.add_argument("--field", default="P")
    dom.add_argument("--vapp", type=float, default=None)
    dom.add_argument("--step", type=int, default=None)
    dom.add_argument("--z-index", type=int, default=None)
    dom.add_argument("--out", type=Path, default=None,
                     help="output basename (default <run_dir>/<field>_slice.png)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        artifacts = load_run(args.run_dir)
        if args.command == "qv":
            out = args.out or args.run_dir / "qv.png"
            written = plot_qv(artifacts, out)
        else:
            out = args.out or args.run_dir / f"{args.field}_slice.png"
            written = plot_domains(artifacts, args.field, out,
                                   v_app=args.vapp, step=args.step,
                                   z_index=args.z_index)
    except (FileNotFoundError, SchemaError, KeyError, IndexError) as exc:
        print(f"analyze: {exc}", file=sys.stderr)
        return 2
    for p in written:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
