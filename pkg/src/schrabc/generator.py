"""Semi-discrete generators ``dphi/dt = L phi`` and their Hermitian split.

Every boundary treatment in this package ends up in the form
``L = -i H0 - H1`` with both ``H0`` and ``H1`` Hermitian; ``H1`` carries the
dissipation.
"""
from __future__ import annotations

from dataclasses import dataclass

import scipy.sparse as sp

from .numerics import adjoint


@dataclass(frozen=True)
class Generator:
    L: object  # dense ndarray or scipy.sparse matrix, n x n
    label: str = ""

    @property
    def n(self) -> int:
        return self.L.shape[0]


@dataclass(frozen=True)
class HermitianPair:
    H0: object
    H1: object

    @property
    def n(self) -> int:
        return self.H0.shape[0]


def _symmetrize(A):
    A = 0.5 * (A + adjoint(A))
    return A.tocsr() if sp.issparse(A) else A


def hermitian_split(g: Generator) -> HermitianPair:
    L = g.L
    Lh = adjoint(L)
    H0 = _symmetrize((L - Lh) * 0.5j)
    H1 = _symmetrize(-0.5 * (L + Lh))
    return HermitianPair(H0, H1)


def assemble(pair: HermitianPair, label: str = "") -> Generator:
    L = -1j * pair.H0 - pair.H1
    if sp.issparse(L):
        L = L.tocsr()
    return Generator(L, label)
