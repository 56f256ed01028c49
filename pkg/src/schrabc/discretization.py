"""Uniform 2-D grids, finite-difference matrices and sampled fields.

Flattening convention: node ``(x_i, y_j)`` (1-based ``i, j``) lives at index
``(j-1)*N + (i-1)``, so x runs fastest. With ``scipy.sparse.kron`` this means
the second Kronecker slot acts on x and the first on y:
``kron(I, Dx)`` is d/dx and ``kron(Dy, I)`` is d/dy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import BadBounds, IncommensurateGrids

DEFAULT_DOMAIN = (-3.0, 3.0)


@dataclass(frozen=True)
class Grid2D:
    """Tensor grid with a homogeneous Dirichlet frame; only interior nodes are stored."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    N: int

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.N + 1)

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / (self.N + 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(1, self.N + 1)

    @property
    def y(self) -> np.ndarray:
        return self.y_min + self.dy * np.arange(1, self.N + 1)

    @property
    def n(self) -> int:
        return self.N * self.N

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened node coordinates ``(X, Y)`` in storage order."""
        X, Y = np.meshgrid(self.x, self.y)
        return X.ravel(), Y.ravel()

    def bounds(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.x_max, self.y_min, self.y_max)


def _as_bounds(bounds) -> tuple[float, float, float, float]:
    b = tuple(float(v) for v in bounds)
    if len(b) == 2:
        return (b[0], b[1], b[0], b[1])
    if len(b) == 4:
        return b
    raise BadBounds(f"bounds must have 2 or 4 entries, got {len(b)}")


def build_grid(bounds=DEFAULT_DOMAIN, N: int = 64) -> Grid2D:
    """``bounds`` is ``(lo, hi)`` for a square or ``(x_min, x_max, y_min, y_max)``."""
    x_min, x_max, y_min, y_max = _as_bounds(bounds)
    if int(N) != N or N < 1:
        raise BadBounds(f"N must be a positive integer, got {N!r}")
    if not (x_max > x_min and y_max > y_min):
        raise BadBounds(f"empty domain {bounds!r}")
    return Grid2D(x_min, x_max, y_min, y_max, int(N))


def fd_matrices(N: int, h: float) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Central first- and second-difference matrices on ``N`` interior nodes."""
    e = np.ones(N - 1)
    Dx = sp.diags([-e, e], [-1, 1], shape=(N, N)) / (2.0 * h)
    Dxx = sp.diags([e, -2.0 * np.ones(N), e], [-1, 0, 1], shape=(N, N)) / h**2
    return Dx.tocsr(), Dxx.tocsr()


def build_fd_ops(grid: Grid2D) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """``(Dx, Dxx)`` along x, truncated by the Dirichlet frame."""
    return fd_matrices(grid.N, grid.dx)


def kinetic_2d(grid: Grid2D) -> sp.csr_matrix:
    """``-(1/2)(Dyy (x) I + I (x) Dxx)``, the five-point kinetic energy."""
    _, Dxx = fd_matrices(grid.N, grid.dx)
    _, Dyy = fd_matrices(grid.N, grid.dy)
    I = sp.identity(grid.N, format="csr")
    return (-0.5 * (sp.kron(Dyy, I) + sp.kron(I, Dxx))).tocsr()


def hamiltonian_2d(grid: Grid2D, V=None) -> sp.csr_matrix:
    """Discrete ``-lap/2 + V`` with V given as a length-``n`` sample vector."""
    H = kinetic_2d(grid)
    if V is not None:
        H = (H + sp.diags(np.asarray(V, dtype=float))).tocsr()
    return H


def sample_field(f, grid: Grid2D) -> np.ndarray:
    """Evaluate ``f(x, y)`` (vectorized) at every interior node, in storage order."""
    X, Y = grid.mesh()
    values = np.broadcast_to(f(X, Y), X.shape)
    return np.array(values)


def default_potential(x, y):
    """``sin(2 pi r)`` inside the unit disc, zero outside."""
    r = np.hypot(x, y)
    return np.where(r <= 1.0, np.sin(2 * np.pi * r), 0.0)


def wavepacket(x, y):
    r = np.hypot(x, y)
    inside = 1 + np.cos(np.pi * r) + 1j * (np.cos(2 * np.pi * r) - 1)
    return np.where(r <= 1.0, inside, 0.0)


def initial_wavepacket(grid: Grid2D) -> np.ndarray:
    return sample_field(wavepacket, grid).astype(complex)


def extend_grid(grid: Grid2D, bounds) -> tuple[Grid2D, int]:
    """Grow ``grid`` by whole cells until it covers ``bounds``.

    Returns the node-aligned outer grid and the number ``K`` of added nodes per
    side. The outer frame therefore sits at ``grid.x_min - K*dx`` rather than
    exactly at the requested bound; it is never smaller than requested.
    """
    lo_x, hi_x, lo_y, hi_y = _as_bounds(bounds)
    if abs(grid.dx - grid.dy) > 1e-12 * grid.dx:
        raise BadBounds("extend_grid needs square cells")
    gaps = (grid.x_min - lo_x, hi_x - grid.x_max, grid.y_min - lo_y, hi_y - grid.y_max)
    if min(gaps) <= 0:
        raise BadBounds(f"bounds {bounds!r} do not strictly contain the grid domain")
    K = max(math.ceil(g / grid.dx - 1e-9) for g in gaps)
    h = grid.dx
    return Grid2D(grid.x_min - K * h, grid.x_max + K * h, grid.y_min - K * h, grid.y_max + K * h,
                  grid.N + 2 * K), K


def embedding_indices(inner: Grid2D, outer: Grid2D) -> np.ndarray:
    """Flattened indices of ``inner``'s nodes inside ``outer`` (storage order of ``inner``).

    Raises ``IncommensurateGrids`` if the spacings differ or the nodes do not coincide.
    """
    h = outer.dx
    if abs(inner.dx - h) > 1e-10 * h or abs(inner.dy - outer.dy) > 1e-10 * h:
        raise IncommensurateGrids(f"spacings differ: {inner.dx:.6g} vs {h:.6g}")
    off = []
    for a, b, step in ((inner.x[0], outer.x[0], outer.dx), (inner.y[0], outer.y[0], outer.dy)):
        k = (a - b) / step
        if abs(k - round(k)) > 1e-8:
            raise IncommensurateGrids(f"node offset {k:.6g} cells is not an integer")
        off.append(int(round(k)))
    ox, oy = off
    if ox < 0 or oy < 0 or ox + inner.N > outer.N or oy + inner.N > outer.N:
        raise IncommensurateGrids("inner grid does not fit inside the outer grid")
    i = np.arange(inner.N)
    return ((oy + i)[:, None] * outer.N + (ox + i)[None, :]).ravel()
