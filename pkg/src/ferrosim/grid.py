"""Uniform 3D Cartesian mesh with ghost cells, tile decomposition, reductions.

Conventions used throughout the package:
  - cell-centered collocated fields; cell (i,j,k) has center ((i+0.5)dx, ...)
  - k=0 is z_min (bottom contact), k=nz-1 is z_max (top contact)
  - x and y are always periodic; the z closure is per-field (ZRule)
  - ghost width is 1 (every stencil here is 3-point per axis)

Reductions are evaluated in a fixed, tiling-independent order (a single numpy
pairwise sum over the interior), so results are bit-identical for any tile
decomposition and any thread count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Tile",
    "Grid",
    "ZRule",
    "ScalarField",
    "create_grid",
    "exchange_ghosts",
    "plane_average",
    "volume_integral",
]


@dataclass(frozen=True)
class Tile:
    """Half-open index box [ilo,ihi) x [jlo,jhi) x [klo,khi)."""

    ilo: int
    ihi: int
    jlo: int
    jhi: int
    klo: int
    khi: int

    @property
    def ncells(self) -> int:
        return (self.ihi - self.ilo) * (self.jhi - self.jlo) * (self.khi - self.klo)


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float
    tiles: tuple[Tile, ...] = field(default_factory=tuple)
    nghost: int = 1

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 4:
            raise ValueError(f"cell counts must be >= 4, got {(self.nx, self.ny, self.nz)}")
        if min(self.dx, self.dy, self.dz) <= 0.0:
            raise ValueError(f"cell sizes must be > 0, got {(self.dx, self.dy, self.dz)}")
        if self.nghost < 1:
            raise ValueError("nghost must be >= 1")

    @property
    def Lx(self) -> float:
        return self.nx * self.dx

    @property
    def Ly(self) -> float:
        return self.ny * self.dy

    @property
    def Lz(self) -> float:
        return self.nz * self.dz

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz

    def x_centers(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5) * self.dy

    def z_centers(self) -> np.ndarray:
        return (np.arange(self.nz) + 0.5) * self.dz

    def meshgrid(self):
        return np.meshgrid(self.x_centers(), self.y_centers(), self.z_centers(), indexing="ij")


def _split_axis(n: int, nchunks: int) -> list[tuple[int, int]]:
    """Deterministic near-even split of range(n) into nchunks contiguous pieces."""
    bounds = [(n * c) // nchunks for c in range(nchunks + 1)]
    return [(bounds[c], bounds[c + 1]) for c in range(nchunks) if bounds[c + 1] > bounds[c]]


def create_grid(nx: int, ny: int, nz: int, dx: float, dy: float, dz: float,
                max_tile_cells: int = 1 << 22) -> Grid:
    """Build a grid whose tiles each hold at most max_tile_cells cells.

    Tiles are x-slabs; if a single yz-plane already exceeds the budget the
    slabs are further split along y. z is never split (plane reductions stay
    contiguous). The decomposition is deterministic for fixed inputs.
    """
    if max_tile_cells < 64:
        raise ValueError("max_tile_cells must be >= 64")
    plane = ny * nz
    if plane <= max_tile_cells:
        rows = max(1, max_tile_cells // plane)
        nslabs = -(-nx // rows)
        tiles = [Tile(i0, i1, 0, ny, 0, nz) for (i0, i1) in _split_axis(nx, nslabs)]
    else:
        cols = max(1, max_tile_cells // nz)
        nysplit = -(-ny // cols)
        tiles = [
            Tile(i, i + 1, j0, j1, 0, nz)
            for i in range(nx)
            for (j0, j1) in _split_axis(ny, nysplit)
        ]
    return Grid(nx, ny, nz, dx, dy, dz, tuple(tiles))


@dataclass(frozen=True)
class ZRule:
    """Closure rule for the z ghost layers of one field."""

    kind: str  # "periodic" | "dirichlet" | "one_sided"
    lo: float = 0.0
    hi: float = 0.0

    @staticmethod
    def periodic() -> "ZRule":
        return ZRule("periodic")

    @staticmethod
    def dirichlet(lo: float, hi: float) -> "ZRule":
        return ZRule("dirichlet", lo, hi)

    @staticmethod
    def one_sided() -> "ZRule":
        return ZRule("one_sided")


class ScalarField:
    """Cell-centered real field over a Grid, stored with one ghost layer."""

    __slots__ = ("grid", "data", "z_rule")

    def __init__(self, grid: Grid, data: np.ndarray | None = None,
                 z_rule: ZRule = ZRule.one_sided()):
        self.grid = grid
        shape = (grid.nx + 2, grid.ny + 2, grid.nz + 2)
        if data is None:
            data = np.zeros(shape)
        if data.shape != shape:
            raise ValueError(f"expected ghosted shape {shape}, got {data.shape}")
        self.data = data
        self.z_rule = z_rule

    # -- constructors ------------------------------------------------------
    @classmethod
    def zeros(cls, grid: Grid, z_rule: ZRule = ZRule.one_sided()) -> "ScalarField":
        return cls(grid, None, z_rule)

    @classmethod
    def full(cls, grid: Grid, value: float, z_rule: ZRule = ZRule.one_sided()) -> "ScalarField":
        f = cls(grid, None, z_rule)
        f.data[...] = value
        return f

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
                      z_rule: ZRule = ZRule.one_sided()) -> "ScalarField":
        f = cls(grid, None, z_rule)
        X, Y, Z = grid.meshgrid()
        f.interior[...] = fn(X, Y, Z)
        return f

    # -- views -------------------------------------------------------------
    @property
    def interior(self) -> np.ndarray:
        return self.data[1:-1, 1:-1, 1:-1]

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.data.copy(), self.z_rule)

    def assert_finite(self, context: str = "") -> None:
        if not np.all(np.isfinite(self.interior)):
            raise FloatingPointError(f"non-finite field values{': ' + context if context else ''}")


def exchange_ghosts(f: ScalarField, z_rule: ZRule | None = None) -> ScalarField:
    """Fill ghost layers: periodic images in x/y, z per rule. Returns f."""
    rule = f.z_rule if z_rule is None else z_rule
    d = f.data
    # periodic x
    d[0, 1:-1, 1:-1] = d[-2, 1:-1, 1:-1]
    d[-1, 1:-1, 1:-1] = d[1, 1:-1, 1:-1]
    # periodic y (after x so that edge ghosts in the xy corners are consistent)
    d[:, 0, 1:-1] = d[:, -2, 1:-1]
    d[:, -1, 1:-1] = d[:, 1, 1:-1]
    # z closure
    if rule.kind == "periodic":
        d[:, :, 0] = d[:, :, -2]
        d[:, :, -1] = d[:, :, 1]
    elif rule.kind == "dirichlet":
        # boundary value lives on the z face: ghost = 2*V - interior (2nd order)
        d[:, :, 0] = 2.0 * rule.lo - d[:, :, 1]
        d[:, :, -1] = 2.0 * rule.hi - d[:, :, -2]
    elif rule.kind == "one_sided":
        # zero-gradient copy; stencils that need a sharper closure build their
        # own one-sided expressions from interior data
        d[:, :, 0] = d[:, :, 1]
        d[:, :, -1] = d[:, :, -2]
    else:  # pragma: no cover - construction-time error
        raise ValueError(f"unknown z rule {rule.kind!r}")
    return f


def plane_average(f: ScalarField, k: int) -> float:
    """Arithmetic mean over the nx*ny cells of z-plane k (deterministic)."""
    g = f.grid
    if not 0 <= k < g.nz:
        raise ValueError(f"plane index {k} out of range [0, {g.nz})")
    return float(np.sum(f.interior[:, :, k]) / (g.nx * g.ny))


def volume_integral(f: ScalarField, mask: np.ndarray | None = None) -> float:
    """Midpoint-rule integral sum(f * dV) over all (or masked) interior cells."""
    g = f.grid
    inner = f.interior
    if mask is None:
        s = np.sum(inner)
    else:
        if mask.shape != g.shape:
            raise ValueError(f"mask shape {mask.shape} != grid shape {g.shape}")
        s = np.sum(inner, where=mask)
    return float(s * g.cell_volume)
