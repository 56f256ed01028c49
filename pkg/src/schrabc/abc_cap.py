"""Complex absorbing potential.

The layer outside the inner box ``[-w, w]^2`` carries a purely imaginary
potential ``W = -i s ((|x| - w)_+^p + (|y| - w)_+^p)``; inside the box the
dynamics is left untouched.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .discretization import Grid2D, kinetic_2d, sample_field
from .errors import PositiveImagPotential, ProfileOutOfDomain
from .generator import Generator, HermitianPair, assemble


@dataclass(frozen=True)
class CapProfile:
    inner_half_width: float = 2.2
    strength: float = 10.0
    exponent: int = 2

    def __post_init__(self):
        if self.strength < 0:
            raise ValueError("strength must be >= 0")
        if self.exponent < 1:
            raise ValueError("exponent must be >= 1")

    def ramp(self, s):
        return self.strength * np.clip(np.abs(s) - self.inner_half_width, 0.0, None) ** self.exponent

    def __call__(self, x, y):
        return -1j * (self.ramp(x) + self.ramp(y))


def check_inner_box(w: float, grid: Grid2D) -> None:
    if w <= 0 or not (grid.x_min < -w and w < grid.x_max and grid.y_min < -w and w < grid.y_max):
        raise ProfileOutOfDomain(f"inner box [-{w}, {w}]^2 is not inside the grid domain {grid.bounds()}")


def cap_potential(profile: CapProfile, grid: Grid2D) -> np.ndarray:
    check_inner_box(profile.inner_half_width, grid)
    return sample_field(profile, grid).astype(complex)


def build_cap_generator(grid: Grid2D, V, W) -> HermitianPair:
    """``H0 = -lap/2 + V + diag(Re W)``, ``H1 = -diag(Im W)``."""
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=complex)
    if np.any(W.imag > 0):
        raise PositiveImagPotential(f"Im W reaches {W.imag.max():.3g} > 0")
    H0 = (kinetic_2d(grid) + sp.diags(V + W.real)).tocsr()
    H1 = sp.diags(-W.imag).tocsr()
    return HermitianPair(H0, H1)


def cap_generator(grid: Grid2D, V, W) -> Generator:
    return assemble(build_cap_generator(grid, V, W), label="cap")
