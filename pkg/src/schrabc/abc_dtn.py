"""Dirichlet-to-Neumann boundary treatment via a truncated exterior.

The Hamiltonian on a large box ``D`` is partitioned into the computational
nodes (interior, ``int``) and the exterior nodes (``ext``). ``gamma`` lists the
interior nodes coupled to the exterior. Eliminating the exterior at the
Laplace variable ``s0`` gives

    R = -H_{g,ext} (H_ext - i s0)^{-1} H_{ext,g} = -G0 - i s0 G1

Order 0 closes the interior system with ``-i E^T R E``. Order 1 keeps one
auxiliary unknown per boundary node and, after the change of variables
``aux = S^{-1/2} phi`` with ``S = H_{g,ext} H_{ext,g}``, evolves under

    [ -i H_int        -i Sigma_ig ]
    [ -i Sigma_ig^T   Sigma_gg    ],   Sigma_ig = E^T S^{1/2},
                                       Sigma_gg = s0 I + i S^{1/2} R^{-1} S^{1/2}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discretization import Grid2D, _as_bounds, embedding_indices, extend_grid, hamiltonian_2d, sample_field
from .errors import EmptyExterior, OmegaNotInsideD, SingularShift
from .generator import Generator, hermitian_split
from .numerics import psd_sqrt


@dataclass(frozen=True)
class Partition:
    H_int: sp.csr_matrix
    H_int_ext: sp.csr_matrix
    H_ext: sp.csc_matrix
    gamma: np.ndarray  # positions of boundary nodes within the interior ordering
    int_index: np.ndarray  # interior nodes as indices of the full matrix
    ext_index: np.ndarray

    @property
    def n_int(self) -> int:
        return self.H_int.shape[0]

    @property
    def n_ext(self) -> int:
        return self.H_ext.shape[0]

    @property
    def n_gamma(self) -> int:
        return self.gamma.size

    @property
    def H_gamma_ext(self) -> sp.csr_matrix:
        return self.H_int_ext[self.gamma]

    @property
    def H_ext_gamma(self) -> sp.csr_matrix:
        return self.H_gamma_ext.T.tocsr()

    def restrict(self, psi_int):
        """``E psi``: boundary values of an interior vector."""
        return np.asarray(psi_int)[self.gamma]


@dataclass(frozen=True)
class SelfEnergy:
    s0: float
    S: np.ndarray
    S_half: np.ndarray
    R: np.ndarray
    G0: np.ndarray
    G1: np.ndarray
    Sigma_ig: sp.csr_matrix
    Sigma_gg: np.ndarray | None  # None when R is singular


def partition_matrix(H, interior, order=None) -> Partition:
    """Partition a real symmetric ``H`` by a boolean ``interior`` mask.

    ``order`` optionally gives a sort key per interior node used to order
    ``gamma`` (e.g. a polar angle for a ring); otherwise ``gamma`` follows the
    interior ordering.
    """
    H = sp.csr_matrix(H)
    interior = np.asarray(interior, dtype=bool)
    int_index = np.flatnonzero(interior)
    ext_index = np.flatnonzero(~interior)
    return _partition(H, int_index, ext_index, order)


def _partition(H, int_index, ext_index, order):
    if ext_index.size == 0:
        raise EmptyExterior("the exterior is empty: there is nothing to absorb")
    H_int = H[int_index][:, int_index].tocsr()
    H_int_ext = H[int_index][:, ext_index].tocsr()
    H_ext = H[ext_index][:, ext_index].tocsc()
    coupled = np.flatnonzero(np.asarray(abs(H_int_ext).sum(axis=1)).ravel() > 0)
    if coupled.size == 0:
        raise EmptyExterior("no interior node couples to the exterior")
    if order is not None:
        key = np.asarray(order)[coupled]
        coupled = coupled[np.argsort(key, kind="stable")]
    return Partition(H_int, H_int_ext, H_ext, coupled, int_index, ext_index)


def partition(grid_D: Grid2D, omega, V=None) -> Partition:
    """Split the Hamiltonian on ``grid_D`` into the nodes of ``omega`` and the rest.

    ``omega`` is either a ``Grid2D`` node-aligned with ``grid_D`` (see
    ``extend_grid``) or box bounds ``(lo, hi)`` / ``(x0, x1, y0, y1)``, in which
    case the interior is every node of ``grid_D`` strictly inside the box. ``V``
    is a callable ``V(x, y)`` or samples on ``grid_D``; it is forced to zero on
    the exterior. The boundary set is ordered counter-clockwise around the
    centre of ``omega``.
    """
    box = omega.bounds() if isinstance(omega, Grid2D) else _as_bounds(omega)
    x0, x1, y0, y1 = box
    if not (grid_D.x_min < x0 and x1 < grid_D.x_max and grid_D.y_min < y0 and y1 < grid_D.y_max):
        raise OmegaNotInsideD(f"omega {box} is not strictly inside D {grid_D.bounds()}")
    XD, YD = grid_D.mesh()
    XD, YD = XD.ravel(), YD.ravel()
    if isinstance(omega, Grid2D):
        int_index = embedding_indices(omega, grid_D)
    else:
        tol = 1e-9 * grid_D.dx
        inside = (XD > x0 + tol) & (XD < x1 - tol) & (YD > y0 + tol) & (YD < y1 - tol)
        int_index = np.flatnonzero(inside)
    interior = np.zeros(grid_D.n, dtype=bool)
    interior[int_index] = True
    if V is None:
        Vd = np.zeros(grid_D.n)
    elif callable(V):
        Vd = sample_field(V, grid_D).astype(float)
    else:
        Vd = np.array(V, dtype=float)
    Vd[~interior] = 0.0
    H = hamiltonian_2d(grid_D, Vd)
    angle = np.arctan2(YD[int_index] - 0.5 * (y0 + y1), XD[int_index] - 0.5 * (x0 + x1))
    return _partition(H, int_index, np.flatnonzero(~interior), angle)


def dtn_R(part: Partition, s0: float) -> np.ndarray:
    if s0 == 0:
        raise SingularShift("s0 must be nonzero")
    shifted = (part.H_ext - 1j * s0 * sp.identity(part.n_ext, format="csc")).tocsc()
    try:
        lu = spla.splu(shifted)
    except RuntimeError as exc:
        raise SingularShift(str(exc)) from exc
    rhs = part.H_ext_gamma.toarray().astype(complex)
    Z = lu.solve(rhs)
    return -np.asarray(part.H_gamma_ext @ Z)


def dtn_G(part: Partition, s0: float) -> tuple[np.ndarray, np.ndarray]:
    """``G0, G1`` through the real resolvent ``(H_ext^2 + s0^2)^{-1}``.

    This route never touches the complex shift, so ``R = -G0 - i s0 G1`` is an
    independent consistency check on ``dtn_R``.
    """
    if s0 == 0:
        raise SingularShift("s0 must be nonzero")
    H = part.H_ext
    A = (H @ H + s0**2 * sp.identity(part.n_ext, format="csc")).tocsc()
    try:
        lu = spla.splu(A)
    except RuntimeError as exc:
        raise SingularShift(str(exc)) from exc
    B = part.H_ext_gamma.toarray()
    Hg = part.H_gamma_ext
    G1 = np.asarray(Hg @ lu.solve(B))
    G0 = np.asarray(Hg @ lu.solve(np.asarray(H @ B)))
    return 0.5 * (G0 + G0.T.conj()), 0.5 * (G1 + G1.T.conj())


def _gamma_rows(part: Partition, M) -> sp.csr_matrix:
    """``E^T M`` as a sparse ``n_int x k`` matrix."""
    M = sp.csr_matrix(M)
    rows = sp.csr_matrix((np.ones(part.n_gamma), (part.gamma, np.arange(part.n_gamma))),
                         shape=(part.n_int, part.n_gamma))
    return (rows @ M).tocsr()


def self_energy(part: Partition, s0: float = 1.0) -> SelfEnergy:
    Hg = part.H_gamma_ext
    S = np.asarray((Hg @ part.H_ext_gamma).toarray(), dtype=float)
    S_half = psd_sqrt(S)
    R = dtn_R(part, s0)
    G0, G1 = dtn_G(part, s0)
    try:
        Rinv = np.linalg.inv(R)
    except np.linalg.LinAlgError:
        Sigma_gg = None  # only order 0 is available without R^{-1}
    else:
        Sigma_gg = s0 * np.eye(part.n_gamma) + 1j * S_half @ Rinv @ S_half
    Sigma_ig = _gamma_rows(part, S_half)
    return SelfEnergy(s0, S, S_half, R, G0, G1, Sigma_ig, Sigma_gg)


def build_dtn_generator(part: Partition, s0: float = 1.0, order: int = 1):
    """Return ``(Generator, HermitianPair, SelfEnergy)`` for Pade order 0 or 1.

    Order 0 acts on the interior unknowns; order 1 on ``[psi_int; aux]`` with
    one auxiliary entry per boundary node (in ``gamma`` order).
    """
    if order not in (0, 1):
        raise ValueError(f"Pade order must be 0 or 1, got {order!r}")
    se = self_energy(part, s0)
    if order == 0:
        ERE = _gamma_rows(part, _gamma_rows(part, se.R).T).T
        L = (-1j * part.H_int - 1j * ERE).tocsr()
        g = Generator(L, "dtn0")
    else:
        if se.Sigma_gg is None:
            raise SingularShift("R is singular; the order-1 closure needs R^{-1}")
        Sig = se.Sigma_ig
        L = sp.bmat([
            [-1j * part.H_int, -1j * Sig],
            [-1j * Sig.T, sp.csr_matrix(se.Sigma_gg)],
        ], format="csr")
        g = Generator(L, "dtn1")
    return g, hermitian_split(g), se


def pade1_coefficients(se: SelfEnergy) -> tuple[np.ndarray, np.ndarray]:
    """``A = -i S`` and ``B = s0 I - A R^{-1}`` of the untransformed order-1 system."""
    A = -1j * se.S
    B = se.s0 * np.eye(se.S.shape[0]) - A @ np.linalg.inv(se.R)
    return A, B


def ab_generator(part: Partition, se: SelfEnergy) -> Generator:
    """Order-1 system on ``[psi_int; phi_gamma]`` before the ``S^{1/2}`` rescaling."""
    A, B = pade1_coefficients(se)
    Et = _gamma_rows(part, sp.identity(part.n_gamma))
    AE = _gamma_rows(part, A.T).T
    L = sp.bmat([
        [-1j * part.H_int, -1j * Et],
        [AE, sp.csr_matrix(B)],
    ], format="csr")
    return Generator(L, "dtn1-ab")


def closed_form_gamma_blocks(se: SelfEnergy) -> tuple[np.ndarray, np.ndarray]:
    """Boundary blocks of ``(H0, H1)`` for order 1, written through ``G0, G1``.

    ``H0_gg = S^{1/2} R^{-1} G0 R^{-H} S^{1/2}`` and
    ``H1_gg = s0 (S^{1/2} R^{-1} G1 R^{-H} S^{1/2} - I)``.
    """
    Rinv = np.linalg.inv(se.R)
    Sh = se.S_half
    H0 = Sh @ Rinv @ se.G0 @ Rinv.conj().T @ Sh
    H1 = se.s0 * (Sh @ Rinv @ se.G1 @ Rinv.conj().T @ Sh - np.eye(Sh.shape[0]))
    return H0, H1


def embed_state(part: Partition, psi_int, order: int) -> np.ndarray:
    """Pad an interior state with zero auxiliaries for the order-1 system."""
    psi_int = np.asarray(psi_int, dtype=complex)
    if order == 0:
        return psi_int.copy()
    return np.concatenate([psi_int, np.zeros(part.n_gamma, dtype=complex)])


def dtn_problem(omega: Grid2D, D_bounds, V=None) -> tuple[Grid2D, Partition]:
    """Build the node-aligned box around ``omega`` and partition it."""
    grid_D, _ = extend_grid(omega, D_bounds)
    return grid_D, partition(grid_D, omega, V)
