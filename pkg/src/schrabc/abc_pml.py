"""Perfectly matched layer on the stacked unknown ``[psi; chi; phi]``.

The block generator is

    [ -i H_V - (I(x)sx + sy(x)I)   (1/2) I(x)Dx    (1/2) Dy(x)I ]
    [ -i I(x)(sx Dx)               -I(x)sx         0            ]
    [ -i (sy Dy)(x)I               0               -sy(x)I      ]

where ``sx = diag(sigma(x_i))`` and ``H_V = -lap/2 + V``. The chi block is
damped by ``sx``: the continuous chi equation only sees ``sigma(x)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .abc_cap import check_inner_box
from .discretization import Grid2D, fd_matrices, hamiltonian_2d
from .generator import Generator, HermitianPair, hermitian_split


@dataclass(frozen=True)
class PmlProfile:
    inner_half_width: float = 2.2
    strength: float = 10.0
    exponent: int = 2

    def __post_init__(self):
        if self.strength < 0:
            raise ValueError("strength must be >= 0")

    def __call__(self, s):
        return self.strength * np.clip(np.abs(s) - self.inner_half_width, 0.0, None) ** self.exponent


def pml_sigma(profile: PmlProfile, grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    check_inner_box(profile.inner_half_width, grid)
    return profile(grid.x), profile(grid.y)


def pml_blocks(grid: Grid2D, V, sigma_x, sigma_y) -> sp.csr_matrix:
    N = grid.N
    I = sp.identity(N, format="csr")
    Dx, _ = fd_matrices(N, grid.dx)
    Dy, _ = fd_matrices(N, grid.dy)
    sx = sp.diags(np.asarray(sigma_x, dtype=float))
    sy = sp.diags(np.asarray(sigma_y, dtype=float))
    HV = hamiltonian_2d(grid, V)
    damp = sp.kron(I, sx) + sp.kron(sy, I)
    L = sp.bmat([
        [-1j * HV - damp, 0.5 * sp.kron(I, Dx), 0.5 * sp.kron(Dy, I)],
        [-1j * sp.kron(I, sx @ Dx), -sp.kron(I, sx), None],
        [-1j * sp.kron(sy @ Dy, I), None, -sp.kron(sy, I)],
    ], format="csr")
    return L.astype(complex)


def build_pml_generator(grid: Grid2D, V, profile: PmlProfile) -> tuple[sp.csr_matrix, HermitianPair]:
    """Assemble ``L_h`` and split it; ``V`` is zeroed outside the inner box."""
    sigma_x, sigma_y = pml_sigma(profile, grid)
    V = np.array(V, dtype=float)
    X, Y = grid.mesh()
    w = profile.inner_half_width
    outside = (np.abs(X) > w) | (np.abs(Y) > w)
    if np.any(V[outside] != 0):
        warnings.warn("potential is nonzero inside the PML layer; it is set to zero there",
                      stacklevel=2)
        V[outside] = 0.0
    L = pml_blocks(grid, V, sigma_x, sigma_y)
    return L, hermitian_split(Generator(L, "pml"))


def pml_initial_state(psi0) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    return np.concatenate([psi0, np.zeros_like(psi0), np.zeros_like(psi0)])
