"""Post-processing for simulator run directories (CSV time series + VTK snapshots)."""

from .artifacts import (CSV_COLUMNS, RunArtifacts, SchemaError, Snapshot,
                        load_run, read_csv, read_vtk)
from .figures import plot_domains, plot_qv

__all__ = ["CSV_COLUMNS", "RunArtifacts", "SchemaError", "Snapshot",
           "load_run", "read_csv", "read_vtk", "plot_domains", "plot_qv"]

__version__ = "0.1.0"
