"""Variable-coefficient Poisson solve: div(eps grad Phi) = dP/dz - rho.

Cell-centered geometric multigrid, periodic in x/y, Dirichlet on the z faces
(ghost = 2*V - interior). Face permittivity is the harmonic mean of the two
adjacent cells, which keeps eps*E flux-continuous across layer interfaces.
The applied-voltage boundary values are lifted into the right-hand side at
the finest level, so every level runs a homogeneous problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .grid import Grid, ScalarField, ZRule, exchange_ghosts

__all__ = [
    "MultigridConfig",
    "PoissonProblem",
    "PoissonConvergenceError",
    "MultigridSolver",
    "SolveReport",
    "assemble_rhs",
    "apply_operator",
    "electric_field",
    "solve",
]

RESIDUAL_FLOOR = 1e-30


class PoissonConvergenceError(RuntimeError):
    def __init__(self, cycles: int, rel_residual: float):
        super().__init__(
            f"multigrid failed to converge: rel residual {rel_residual:.3e} after {cycles} V-cycles")
        self.cycles = cycles
        self.rel_residual = rel_residual


@dataclass(frozen=True)
class MultigridConfig:
    pre_smooth: int = 2
    post_smooth: int = 2
    max_vcycles: int = 60
    bottom_solver: str = "direct_small"  # or "smoother"
    bottom_sweeps: int = 64
    coarsest_size: int = 4

    def __post_init__(self):
        if self.pre_smooth < 1 or self.post_smooth < 1:
            raise ValueError("smoothing sweep counts must be >= 1")
        if self.coarsest_size < 2:
            raise ValueError("coarsest_size must be >= 2")
        if self.bottom_solver not in ("direct_small", "smoother"):
            raise ValueError(f"unknown bottom solver {self.bottom_solver!r}")


@dataclass(frozen=True)
class PoissonProblem:
    eps_field: ScalarField
    rhs: ScalarField
    bc_lo_z: float
    bc_hi_z: float
    tol: float = 1e-10

    def __post_init__(self):
        if not 0.0 < self.tol < 1.0:
            raise ValueError("tol must lie in (0, 1)")
        if np.any(self.eps_field.interior <= 0.0):
            raise ValueError("eps_field must be positive everywhere")


@dataclass(frozen=True)
class SolveReport:
    cycles: int
    rel_residual: float
    converged: bool


def _harmonic(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return 2.0 * a * b / (a + b)


def _face_coeffs(eps: np.ndarray):
    """(cfx, cfy, cfz) face coefficients; z boundary faces carry 2*eps_cell."""
    cfx = _harmonic(np.roll(eps, 1, axis=0), eps)
    cfy = _harmonic(np.roll(eps, 1, axis=1), eps)
    nx, ny, nz = eps.shape
    cfz = np.empty((nx, ny, nz + 1))
    cfz[:, :, 1:-1] = _harmonic(eps[:, :, :-1], eps[:, :, 1:])
    cfz[:, :, 0] = 2.0 * eps[:, :, 0]
    cfz[:, :, -1] = 2.0 * eps[:, :, -1]
    return cfx, cfy, cfz


class _Level:
    def __init__(self, eps: np.ndarray, dx: float, dy: float, dz: float):
        self.shape = eps.shape
        self.idx2 = 1.0 / (dx * dx)
        self.idy2 = 1.0 / (dy * dy)
        self.idz2 = 1.0 / (dz * dz)
        self.cfx, self.cfy, self.cfz = _face_coeffs(eps)
        self.scratch = np.zeros(eps.shape)


def _assemble_matrix(level: _Level) -> sp.csc_matrix:
    """Dense-pattern sparse assembly of the homogeneous operator (bottom solve)."""
    nx, ny, nz = level.shape
    n = nx * ny * nz

    def lin(i, j, k):
        return (i * ny + j) * nz + k

    rows, cols, vals = [], [], []
    for i in range(nx):
        iw, ie = (i - 1) % nx, (i + 1) % nx
        for j in range(ny):
            js, jn = (j - 1) % ny, (j + 1) % ny
            for k in range(nz):
                cw = level.cfx[i, j, k] * level.idx2
                ce = level.cfx[ie, j, k] * level.idx2
                cs = level.cfy[i, j, k] * level.idy2
                cn = level.cfy[i, jn, k] * level.idy2
                cb = level.cfz[i, j, k] * level.idz2
                ct = level.cfz[i, j, k + 1] * level.idz2
                r = lin(i, j, k)
                diag = -(cw + ce + cs + cn + cb + ct)
                rows.append(r); cols.append(r); vals.append(diag)
                rows.append(r); cols.append(lin(iw, j, k)); vals.append(cw)
                rows.append(r); cols.append(lin(ie, j, k)); vals.append(ce)
                rows.append(r); cols.append(lin(i, js, k)); vals.append(cs)
                rows.append(r); cols.append(lin(i, jn, k)); vals.append(cn)
                if k > 0:
                    rows.append(r); cols.append(lin(i, j, k - 1)); vals.append(cb)
                if k + 1 < nz:
                    rows.append(r); cols.append(lin(i, j, k + 1)); vals.append(ct)
    return sp.csc_matrix(sp.coo_matrix((vals, (rows, cols)), shape=(n, n)))


class MultigridSolver:
    """Geometric multigrid hierarchy for one permittivity field.

    Build once per device stack and reuse across time steps; the coarsest
    level is factorized once (direct_small bottom).
    """

    def __init__(self, grid: Grid, eps_field: ScalarField, cfg: MultigridConfig | None = None):
        self.grid = grid
        self.cfg = cfg or MultigridConfig()
        eps = np.ascontiguousarray(eps_field.interior)
        if np.any(eps <= 0.0):
            raise ValueError("eps_field must be positive everywhere")
        dx, dy, dz = grid.dx, grid.dy, grid.dz
        self.levels: list[_Level] = [_Level(eps, dx, dy, dz)]
        while True:
            nx, ny, nz = eps.shape
            if min(nx, ny, nz) <= self.cfg.coarsest_size:
                break
            # periodic red-black coloring needs even nx, ny on smoothed levels;
            # the first level with any odd axis becomes the (direct) bottom
            if nx % 2 or ny % 2 or nz % 2:
                break
            coarse = np.zeros((nx // 2, ny // 2, nz // 2))
            kernels.restrict_8avg(eps, coarse)
            eps = coarse
            dx, dy, dz = 2 * dx, 2 * dy, 2 * dz
            self.levels.append(_Level(eps, dx, dy, dz))
        self._lu = None
        if self.cfg.bottom_solver == "direct_small":
            self._lu = spla.splu(_assemble_matrix(self.levels[-1]))

    # -- level ops -----------------------------------------------------------
    def _smooth(self, lv: _Level, phi, rhs, sweeps: int):
        for _ in range(sweeps):
            kernels.rbgs_color(phi, rhs, lv.cfx, lv.cfy, lv.cfz, lv.idx2, lv.idy2, lv.idz2, 0)
            kernels.rbgs_color(phi, rhs, lv.cfx, lv.cfy, lv.cfz, lv.idx2, lv.idy2, lv.idz2, 1)

    def _residual(self, lv: _Level, phi, rhs, out):
        kernels.residual(phi, rhs, lv.cfx, lv.cfy, lv.cfz, lv.idx2, lv.idy2, lv.idz2, out)

    def _bottom(self, lv: _Level, phi, rhs):
        if self._lu is not None:
            phi[...] = self._lu.solve(rhs.ravel()).reshape(lv.shape)
        else:
            self._smooth(lv, phi, rhs, self.cfg.bottom_sweeps)

    def _vcycle(self, l: int, phi, rhs):
        lv = self.levels[l]
        if l == len(self.levels) - 1:
            self._bottom(lv, phi, rhs)
            return
        self._smooth(lv, phi, rhs, self.cfg.pre_smooth)
        res = lv.scratch
        self._residual(lv, phi, rhs, res)
        nxt = self.levels[l + 1]
        rhs_c = np.zeros(nxt.shape)
        kernels.restrict_8avg(res, rhs_c)
        err_c = np.zeros(nxt.shape)
        self._vcycle(l + 1, err_c, rhs_c)
        kernels.prolong_add(err_c, phi)
        self._smooth(lv, phi, rhs, self.cfg.post_smooth)

    # -- public --------------------------------------------------------------
    def lift_rhs(self, rhs: np.ndarray, v_lo: float, v_hi: float) -> np.ndarray:
        """Move inhomogeneous Dirichlet data into the rhs of the homogeneous op."""
        lv = self.levels[0]
        out = rhs.copy()
        out[:, :, 0] -= lv.cfz[:, :, 0] * v_lo * lv.idz2
        out[:, :, -1] -= lv.cfz[:, :, -1] * v_hi * lv.idz2
        return out

    def solve_raw(self, rhs: np.ndarray, v_lo: float, v_hi: float, tol: float,
                  phi_guess: np.ndarray | None = None,
                  raise_on_failure: bool = True) -> tuple[np.ndarray, SolveReport]:
        lv = self.levels[0]
        phi = np.zeros(lv.shape) if phi_guess is None else np.ascontiguousarray(phi_guess).copy()
        b = self.lift_rhs(np.ascontiguousarray(rhs), v_lo, v_hi)
        res = np.empty(lv.shape)
        self._residual(lv, phi, b, res)
        r0 = float(np.linalg.norm(res))
        den = max(float(np.linalg.norm(b)), r0, RESIDUAL_FLOOR)
        rel = r0 / den
        cycles = 0
        while rel > tol and cycles < self.cfg.max_vcycles:
            self._vcycle(0, phi, b)
            cycles += 1
            self._residual(lv, phi, b, res)
            rel = float(np.linalg.norm(res)) / den
        report = SolveReport(cycles=cycles, rel_residual=rel, converged=rel <= tol)
        if not report.converged and raise_on_failure:
            raise PoissonConvergenceError(cycles, rel)
        return phi, report

    def solve(self, problem: PoissonProblem, phi_guess: ScalarField | None = None
              ) -> tuple[ScalarField, SolveReport]:
        guess = None if phi_guess is None else phi_guess.interior
        arr, report = self.solve_raw(problem.rhs.interior, problem.bc_lo_z,
                                     problem.bc_hi_z, problem.tol, guess)
        out = ScalarField.zeros(self.grid, ZRule.dirichlet(problem.bc_lo_z, problem.bc_hi_z))
        out.interior[...] = arr
        exchange_ghosts(out)
        return out, report


def solve(problem: PoissonProblem, mgcfg: MultigridConfig | None = None,
          phi_guess: ScalarField | None = None) -> ScalarField:
    """One-shot solve. For repeated solves build a MultigridSolver directly."""
    solver = MultigridSolver(problem.eps_field.grid, problem.eps_field, mgcfg)
    phi, _ = solver.solve(problem, phi_guess)
    return phi


def assemble_rhs(P: ScalarField, rho: ScalarField, stack) -> ScalarField:
    """dP/dz - rho, with dP/dz as the z face-flux divergence of P.

    Face values of P are permittivity-cross-weighted means of the adjacent
    cells, pf = (e_hi*P_lo + e_lo*P_hi)/(e_lo + e_hi) — the value consistent
    with the harmonic-mean face flux, which keeps D_z continuous across layer
    interfaces (the 1D layered series-capacitor solution is then exact; a
    plain arithmetic mean smears the bound interface charge half a cell into
    the dielectric).  For equal permittivities it reduces to the arithmetic
    mean.  At the two domain z-faces the face value is the adjacent cell
    value (the contact screens the surface charge there).
    """
    g = P.grid
    if np.any(P.interior[~stack.fe_mask] != 0.0):
        raise ValueError("P must be identically zero outside the ferroelectric mask")
    p = P.interior
    e = stack.eps_field.interior
    nx, ny, nz = g.shape
    pf = np.empty((nx, ny, nz + 1))
    e_lo, e_hi = e[:, :, :-1], e[:, :, 1:]
    pf[:, :, 1:-1] = (e_hi * p[:, :, :-1] + e_lo * p[:, :, 1:]) / (e_lo + e_hi)
    pf[:, :, 0] = p[:, :, 0]
    pf[:, :, -1] = p[:, :, -1]
    out = ScalarField.zeros(g, ZRule.one_sided())
    out.interior[...] = (pf[:, :, 1:] - pf[:, :, :-1]) / g.dz - rho.interior
    return exchange_ghosts(out)


def apply_operator(eps_field: ScalarField, phi: ScalarField) -> ScalarField:
    """div(eps grad phi) with harmonic-mean face permittivity.

    Dirichlet z data is taken from phi.z_rule via ghost extrapolation; the
    eps ghosts replicate the boundary cells so the boundary face coefficient
    reduces to the cell value.
    """
    exchange_ghosts(eps_field, ZRule.one_sided())
    exchange_ghosts(phi)
    g = phi.grid
    e = eps_field.data
    p = phi.data
    c = (slice(1, -1),) * 3

    def shift(axis, off):
        s = [slice(1, -1)] * 3
        s[axis] = slice(1 + off, -1 + off if off < 1 else None)
        return tuple(s)

    out = np.zeros(g.shape)
    for axis, inv_h2 in ((0, 1.0 / g.dx**2), (1, 1.0 / g.dy**2), (2, 1.0 / g.dz**2)):
        lo, hi = shift(axis, -1), shift(axis, +1)
        c_lo = _harmonic(e[lo], e[c])
        c_hi = _harmonic(e[c], e[hi])
        out += (c_hi * (p[hi] - p[c]) - c_lo * (p[c] - p[lo])) * inv_h2
    res = ScalarField.zeros(g, ZRule.one_sided())
    res.interior[...] = out
    return exchange_ghosts(res)


def electric_field(phi: ScalarField) -> tuple[ScalarField, ScalarField, ScalarField]:
    """Cell-centered E = -grad(phi) by central differences (ghost-aware)."""
    exchange_ghosts(phi)
    g = phi.grid
    p = phi.data
    ex = ScalarField.zeros(g)
    ey = ScalarField.zeros(g)
    ez = ScalarField.zeros(g)
    ex.interior[...] = -(p[2:, 1:-1, 1:-1] - p[:-2, 1:-1, 1:-1]) / (2.0 * g.dx)
    ey.interior[...] = -(p[1:-1, 2:, 1:-1] - p[1:-1, :-2, 1:-1]) / (2.0 * g.dy)
    ez.interior[...] = -(p[1:-1, 1:-1, 2:] - p[1:-1, 1:-1, :-2]) / (2.0 * g.dz)
    for f in (ex, ey, ez):
        exchange_ghosts(f)
    return ex, ey, ez
