"""Read-only loaders for simulator run directories.

A run directory contains a ``sweep.csv`` time series and zero or more legacy
ASCII VTK snapshots named ``<field>_vapp<tag>_step<n>.vtk`` where the tag is
the applied voltage with ``-`` spelled ``m`` (e.g. ``P_vapp m1.25`` ->
``P_vappm1.25_step300.vtk``). Nothing in this module mutates the directory.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["CSV_COLUMNS", "Snapshot", "RunArtifacts", "SchemaError",
           "read_csv", "read_vtk", "load_run"]

# Must match the simulator's documented output schema exactly.
CSV_COLUMNS = ("step", "t_s", "v_app_V", "Q_C_per_m2", "Q_uC_per_cm2",
               "v_fe_avg_V", "v_int_avg_V", "F_total_J", "P_mean_C_per_m2",
               "fp_iters", "settled")

_INT_COLS = {"step", "fp_iters", "settled"}

_VTK_NAME = re.compile(r"^(?P<field>[A-Za-z][A-Za-z0-9]*)_vapp(?P<vapp>[m0-9.eE+-]+)"
                       r"_step(?P<step>\d+)\.vtk$")


class SchemaError(ValueError):
    """CSV or VTK contents do not match the simulator's output contract."""


@dataclass(frozen=True)
class Snapshot:
    field: str
    v_app: float
    step: int
    data: np.ndarray          # (nx, ny, nz)
    spacing: tuple[float, float, float]
    origin: tuple[float, float, float]

    def cell_centers(self, axis: int) -> np.ndarray:
        n = self.data.shape[axis]
        return self.origin[axis] + (np.arange(n) + 0.5) * self.spacing[axis]


@dataclass(frozen=True)
class RunArtifacts:
    timeseries: list[dict]
    snapshots: list[Snapshot]

    def column(self, name: str) -> np.ndarray:
        if name not in CSV_COLUMNS:
            raise SchemaError(f"unknown column {name!r}; schema: {CSV_COLUMNS}")
        return np.array([row[name] for row in self.timeseries])

    def find_snapshot(self, field: str, v_app: float | None = None,
                      step: int | None = None) -> Snapshot:
        cands = [s for s in self.snapshots if s.field == field]
        if not cands:
            avail = sorted({s.field for s in self.snapshots})
            raise KeyError(f"no snapshots for field {field!r}; available: {avail}")
        if v_app is not None:
            cands = [s for s in cands if abs(s.v_app - v_app) < 1e-12] or cands
        if step is not None:
            cands = [s for s in cands if s.step == step]
            if not cands:
                raise KeyError(f"no {field!r} snapshot at step {step}")
        return cands[-1]   # latest checkpoint wins


def read_csv(path: Path | str) -> list[dict]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty CSV") from None
        if tuple(header) != CSV_COLUMNS:
            raise SchemaError(f"{path}: header {header} != expected {list(CSV_COLUMNS)}")
        rows = []
        for raw in reader:
            if len(raw) != len(CSV_COLUMNS):
                raise SchemaError(f"{path}: row width {len(raw)} != {len(CSV_COLUMNS)}")
            row = {}
            for name, cell in zip(CSV_COLUMNS, raw):
                row[name] = int(cell) if name in _INT_COLS else float(cell)
            rows.append(row)
    return rows


def read_vtk(path: Path | str) -> Snapshot:
    """Parse a legacy ASCII STRUCTURED_POINTS scalar file."""
    path = Path(path)
    lines = path.read_text().split("\n")
    meta: dict[str, list[str]] = {}
    body_start = None
    for idx, line in enumerate(lines[:32]):
        parts = line.split()
        if not parts:
            continue
        key = parts[0].upper()
        meta[key] = parts[1:]
        if key == "LOOKUP_TABLE":
            body_start = idx + 1
            break
    for required in ("DIMENSIONS", "ORIGIN", "SPACING", "SCALARS"):
        if required not in meta:
            raise SchemaError(f"{path}: missing {required} header")
    if meta.get("DATASET", [""])[0] != "STRUCTURED_POINTS":
        raise SchemaError(f"{path}: not a STRUCTURED_POINTS dataset")
    nx, ny, nz = (int(v) for v in meta["DIMENSIONS"])
    origin = tuple(float(v) for v in meta["ORIGIN"])
    spacing = tuple(float(v) for v in meta["SPACING"])
    values = np.array([float(v) for v in lines[body_start:] if v.strip()])
    if values.size != nx * ny * nz:
        raise SchemaError(f"{path}: {values.size} values for {nx}x{ny}x{nz} grid")
    # file order is x-fastest; store as (nx, ny, nz)
    data = values.reshape(nz, ny, nx).transpose(2, 1, 0)

    m = _VTK_NAME.match(path.name)
    if m:
        field = m.group("field")
        v_app = float(m.group("vapp").replace("m", "-"))
        step = int(m.group("step"))
    else:
        field = meta["SCALARS"][0]
        v_app, step = float("nan"), -1
    return Snapshot(field, v_app, step, data, spacing, origin)


def load_run(run_dir: Path | str) -> RunArtifacts:
    run_dir = Path(run_dir)
    csv_path = run_dir / "sweep.csv"
    if not csv_path.exists():
        raise FileNotFoundError(f"{run_dir}: no sweep.csv")
    snapshots = [read_vtk(p) for p in sorted(run_dir.glob("*.vtk"))]
    return RunArtifacts(read_csv(csv_path), snapshots)
