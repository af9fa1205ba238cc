"""Numba kernels for the multigrid Poisson solver.

All kernels are pointwise-parallel over disjoint output cells: within one
red-black color, every neighbor read is of the opposite color, so results are
bit-identical for any thread count. x/y wrap periodically; z is handled as
homogeneous Dirichlet on the domain faces (boundary lift happens in the rhs,
see poisson.py).

Face-coefficient layout: cfx[i,j,k] is the coefficient on the x-face between
cells i-1 and i (periodic wrap), shape (nx,ny,nz); likewise cfy. cfz has shape
(nx,ny,nz+1), cfz[...,k] sits below cell k; the two z-boundary faces carry
2*eps_cell, matching the ghost extrapolation ghost = 2*V - interior.
"""

import numba
import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def rbgs_color(phi, rhs, cfx, cfy, cfz, idx2, idy2, idz2, color):
    nx, ny, nz = phi.shape
    for i in prange(nx):
        iw = i - 1 if i > 0 else nx - 1
        ie = i + 1 if i + 1 < nx else 0
        for j in range(ny):
            js = j - 1 if j > 0 else ny - 1
            jn = j + 1 if j + 1 < ny else 0
            kst = (i + j + color) & 1
            for k in range(kst, nz, 2):
                cw = cfx[i, j, k]
                ce = cfx[ie, j, k]
                cs = cfy[i, j, k]
                cn = cfy[i, jn, k]
                cb = cfz[i, j, k]
                ct = cfz[i, j, k + 1]
                diag = (cw + ce) * idx2 + (cs + cn) * idy2 + (cb + ct) * idz2
                acc = (cw * phi[iw, j, k] + ce * phi[ie, j, k]) * idx2 \
                    + (cs * phi[i, js, k] + cn * phi[i, jn, k]) * idy2
                if k > 0:
                    acc += cb * phi[i, j, k - 1] * idz2
                if k + 1 < nz:
                    acc += ct * phi[i, j, k + 1] * idz2
                phi[i, j, k] = (acc - rhs[i, j, k]) / diag


@njit(cache=True, parallel=True)
def apply_homogeneous(phi, cfx, cfy, cfz, idx2, idy2, idz2, out):
    """out = div(c grad phi) with zero z-boundary values."""
    nx, ny, nz = phi.shape
    for i in prange(nx):
        iw = i - 1 if i > 0 else nx - 1
        ie = i + 1 if i + 1 < nx else 0
        for j in range(ny):
            js = j - 1 if j > 0 else ny - 1
            jn = j + 1 if j + 1 < ny else 0
            for k in range(nz):
                cw = cfx[i, j, k]
                ce = cfx[ie, j, k]
                cs = cfy[i, j, k]
                cn = cfy[i, jn, k]
                cb = cfz[i, j, k]
                ct = cfz[i, j, k + 1]
                diag = (cw + ce) * idx2 + (cs + cn) * idy2 + (cb + ct) * idz2
                acc = (cw * phi[iw, j, k] + ce * phi[ie, j, k]) * idx2 \
                    + (cs * phi[i, js, k] + cn * phi[i, jn, k]) * idy2
                if k > 0:
                    acc += cb * phi[i, j, k - 1] * idz2
                if k + 1 < nz:
                    acc += ct * phi[i, j, k + 1] * idz2
                out[i, j, k] = acc - diag * phi[i, j, k]


@njit(cache=True, parallel=True)
def residual(phi, rhs, cfx, cfy, cfz, idx2, idy2, idz2, out):
    nx, ny, nz = phi.shape
    for i in prange(nx):
        iw = i - 1 if i > 0 else nx - 1
        ie = i + 1 if i + 1 < nx else 0
        for j in range(ny):
            js = j - 1 if j > 0 else ny - 1
            jn = j + 1 if j + 1 < ny else 0
            for k in range(nz):
                cw = cfx[i, j, k]
                ce = cfx[ie, j, k]
                cs = cfy[i, j, k]
                cn = cfy[i, jn, k]
                cb = cfz[i, j, k]
                ct = cfz[i, j, k + 1]
                diag = (cw + ce) * idx2 + (cs + cn) * idy2 + (cb + ct) * idz2
                acc = (cw * phi[iw, j, k] + ce * phi[ie, j, k]) * idx2 \
                    + (cs * phi[i, js, k] + cn * phi[i, jn, k]) * idy2
                if k > 0:
                    acc += cb * phi[i, j, k - 1] * idz2
                if k + 1 < nz:
                    acc += ct * phi[i, j, k + 1] * idz2
                out[i, j, k] = rhs[i, j, k] - (acc - diag * phi[i, j, k])


@njit(cache=True, parallel=True)
def restrict_8avg(fine, coarse):
    nxc, nyc, nzc = coarse.shape
    for i in prange(nxc):
        for j in range(nyc):
            for k in range(nzc):
                s = 0.0
                for di in range(2):
                    for dj in range(2):
                        for dk in range(2):
                            s += fine[2 * i + di, 2 * j + dj, 2 * k + dk]
                coarse[i, j, k] = 0.125 * s


@njit(cache=True, parallel=True)
def prolong_add(coarse, fine):
    nxf, nyf, nzf = fine.shape
    for i in prange(nxf):
        for j in range(nyf):
            for k in range(nzf):
                fine[i, j, k] += coarse[i >> 1, j >> 1, k >> 1]


def set_num_threads(n: int) -> None:
    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def warmup() -> None:
    """Trigger JIT compilation on a tiny problem (keeps timings honest)."""
    shape = (4, 4, 4)
    phi = np.zeros(shape)
    rhs = np.zeros(shape)
    cf = np.ones(shape)
    cfz = np.ones((4, 4, 5))
    out = np.zeros(shape)
    rbgs_color(phi, rhs, cf, cf, cfz, 1.0, 1.0, 1.0, 0)
    apply_homogeneous(phi, cf, cf, cfz, 1.0, 1.0, 1.0, out)
    residual(phi, rhs, cf, cf, cfz, 1.0, 1.0, 1.0, out)
    coarse = np.zeros((2, 2, 2))
    restrict_8avg(phi, coarse)
    prolong_add(coarse, phi)
