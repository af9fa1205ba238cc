"""On-disk run artifacts: the sweep CSV and legacy-VTK field snapshots."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Grid

__all__ = ["CSV_COLUMNS", "SweepRecord", "write_csv", "write_vtk",
           "vtk_filename", "format_vapp"]

CSV_COLUMNS = ("step", "t_s", "v_app_V", "Q_C_per_m2", "Q_uC_per_cm2",
               "v_fe_avg_V", "v_int_avg_V", "F_total_J", "P_mean_C_per_m2",
               "fp_iters", "settled")


@dataclass(frozen=True)
class SweepRecord:
    step: int
    t_s: float
    v_app_V: float
    Q_C_per_m2: float
    v_fe_avg_V: float
    v_int_avg_V: float
    F_total_J: float
    P_mean_C_per_m2: float
    fp_iters: int
    settled: bool

    @property
    def Q_uC_per_cm2(self) -> float:
        return self.Q_C_per_m2 * 1.0e2  # C/m^2 -> uC/cm^2

    def row(self) -> list:
        return [self.step, repr(self.t_s), repr(self.v_app_V),
                repr(self.Q_C_per_m2), repr(self.Q_uC_per_cm2),
                repr(self.v_fe_avg_V), repr(self.v_int_avg_V),
                repr(self.F_total_J), repr(self.P_mean_C_per_m2),
                self.fp_iters, int(self.settled)]


def write_csv(path: Path | str, records) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.row())
    return path


def format_vapp(v: float) -> str:
    """Compact voltage tag for filenames: -1.25 -> 'm1.25', 0.5 -> '0.5'."""
    s = f"{v:g}"
    return s.replace("-", "m")


def vtk_filename(field: str, v_app: float, step: int) -> str:
    return f"{field}_vapp{format_vapp(v_app)}_step{step}.vtk"


def write_vtk(path: Path | str, field_name: str, data: np.ndarray, grid: Grid,
              comment: str = "structured-grid snapshot") -> Path:
    """Legacy ASCII STRUCTURED_POINTS file with one cell-centered scalar.

    Values are written as POINT_DATA on an nx*ny*nz lattice with the origin
    at the domain corner, x varying fastest as the format requires.
    """
    if data.shape != grid.shape:
        raise ValueError(f"data shape {data.shape} does not match grid {grid.shape}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    nx, ny, nz = grid.shape
    lines = [
        "# vtk DataFile Version 3.0",
        comment,
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {nx} {ny} {nz}",
        "ORIGIN 0.0 0.0 0.0",
        f"SPACING {grid.dx:.9e} {grid.dy:.9e} {grid.dz:.9e}",
        f"POINT_DATA {nx * ny * nz}",
        f"SCALARS {field_name} double 1",
        "LOOKUP_TABLE default",
    ]
    flat = np.transpose(data, (2, 1, 0)).ravel()  # x varies fastest
    lines.extend(f"{v:.9e}" for v in flat)
    path.write_text("\n".join(lines) + "\n")
    return path
