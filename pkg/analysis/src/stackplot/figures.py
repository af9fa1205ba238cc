"""Figure builders: Q-V hysteresis panels and domain-slice heatmaps.

Every builder writes both PNG and SVG next to the requested path and returns
the list of written files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .artifacts import RunArtifacts, SchemaError, Snapshot

__all__ = ["plot_qv", "plot_domains"]


def _save(fig, out_path: Path | str) -> list[Path]:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for suffix in (".png", ".svg"):
        p = out_path.with_suffix(suffix)
        fig.savefig(p, dpi=150, bbox_inches="tight")
        written.append(p)
    plt.close(fig)
    return written


def _arrow_annotations(ax, x, y, n_arrows=4):
    """Mark loop direction with arrows placed along the record order."""
    valid = np.isfinite(x) & np.isfinite(y)
    x, y = x[valid], y[valid]
    if len(x) < 3:
        return
    picks = np.linspace(1, len(x) - 2, n_arrows, dtype=int)
    for i in picks:
        ax.annotate("", xy=(x[i + 1], y[i + 1]), xytext=(x[i], y[i]),
                    arrowprops=dict(arrowstyle="->", color="0.35", lw=1.2))


def plot_qv(artifacts: RunArtifacts, out_path: Path | str) -> list[Path]:
    """Two panels: interface charge vs applied voltage and vs the average
    ferroelectric-layer voltage, with sweep direction arrows."""
    rows = artifacts.timeseries
    if not rows:
        raise SchemaError("empty sweep: no rows to plot")
    v_app = artifacts.column("v_app_V")
    v_fe = artifacts.column("v_fe_avg_V")
    q = artifacts.column("Q_uC_per_cm2")

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 4.2))
    ax1.plot(v_app, q, "-o", ms=3, lw=1.0, color="tab:blue")
    _arrow_annotations(ax1, v_app, q)
    ax1.set_xlabel(r"$V_{\mathrm{app}}$ (V)")
    ax1.set_ylabel(r"$Q$ ($\mu$C/cm$^2$)")
    ax1.set_title("Charge vs applied voltage")

    ax2.plot(v_fe, q, "-o", ms=3, lw=1.0, color="tab:red")
    _arrow_annotations(ax2, v_fe, q)
    ax2.set_xlabel(r"$V_{\mathrm{fe}}^{\mathrm{avg}}$ (V)")
    ax2.set_ylabel(r"$Q$ ($\mu$C/cm$^2$)")
    ax2.set_title("Charge vs ferroelectric voltage")
    for ax in (ax1, ax2):
        ax.axhline(0, color="0.8", lw=0.8)
        ax.axvline(0, color="0.8", lw=0.8)
    fig.tight_layout()
    return _save(fig, out_path)


def plot_domains(artifacts: RunArtifacts, field: str, out_path: Path | str,
                 v_app: float | None = None, step: int | None = None,
                 z_index: int | None = None) -> list[Path]:
    """Heatmap of one x-y slice of a snapshot. Polarization-like fields get a
    symmetric diverging scale centered on zero; axes are in nanometers."""
    snap: Snapshot = artifacts.find_snapshot(field, v_app=v_app, step=step)
    nx, ny, nz = snap.data.shape
    if z_index is None:
        # default: mid-plane of the region where the field is nonzero
        nonzero = np.where(np.any(snap.data != 0.0, axis=(0, 1)))[0]
        z_index = int(nonzero.mean()) if nonzero.size else nz // 2
    if not 0 <= z_index < nz:
        raise IndexError(f"z index {z_index} outside [0, {nz})")
    plane = snap.data[:, :, z_index].T   # imshow rows = y

    x_nm = snap.cell_centers(0) * 1e9
    y_nm = snap.cell_centers(1) * 1e9
    z_nm = snap.cell_centers(2)[z_index] * 1e9
    extent = [x_nm[0], x_nm[-1], y_nm[0], y_nm[-1]]

    diverging = field in ("P", "rho", "Ez")
    if diverging:
        vmax = float(np.max(np.abs(plane))) or 1.0
        kwargs = dict(cmap="RdBu_r", vmin=-vmax, vmax=vmax)
    else:
        kwargs = dict(cmap="viridis")

    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    im = ax.imshow(plane, origin="lower", extent=extent, aspect="equal", **kwargs)
    ax.set_xlabel("x (nm)")
    ax.set_ylabel("y (nm)")
    ax.set_title(f"{field} at z = {z_nm:.2f} nm "
                 f"(V_app = {snap.v_app:g} V, step {snap.step})")
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    return _save(fig, out_path)
