"""Linear-algebra kernels shared by the rest of the package.

Matrices may be dense ``numpy`` arrays or ``scipy.sparse`` matrices; every
function here accepts either.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import KrylovBreakdown, NotHermitian, NotPSD, UnstableStep

HERMITIAN_RTOL = 1e-10
# dense eigendecomposition is used up to this size, Lanczos above it
DENSE_MAX = 512
KRYLOV_DIM = 40
KRYLOV_TOL = 1e-10


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # unitary, columns


def max_abs(A) -> float:
    """Largest entry magnitude, 0.0 for an empty or all-zero matrix."""
    if sp.issparse(A):
        A = sp.csr_matrix(A)
        return float(np.abs(A.data).max()) if A.nnz else 0.0
    A = np.asarray(A)
    return float(np.abs(A).max()) if A.size else 0.0


def colsum_norm(A) -> float:
    """Maximum absolute column sum (the induced 1-norm)."""
    if sp.issparse(A):
        return float(np.asarray(abs(A).sum(axis=0)).max()) if A.shape[1] else 0.0
    return float(np.abs(np.asarray(A)).sum(axis=0).max())


def adjoint(A):
    return A.conj().T


def hermitian_defect(A) -> float:
    return max_abs(A - adjoint(A))


def check_hermitian(A, rtol: float = HERMITIAN_RTOL) -> None:
    if A.shape[0] != A.shape[1]:
        raise NotHermitian(f"matrix is not square: {A.shape}")
    scale = max_abs(A)
    defect = hermitian_defect(A)
    if defect > rtol * scale:
        raise NotHermitian(f"max|A - A^H| = {defect:.3e} exceeds {rtol:g} * max|A| = {rtol * scale:.3e}")


def _dense(A) -> np.ndarray:
    return A.toarray() if sp.issparse(A) else np.asarray(A)


def hermitian_eig(A) -> HermitianEig:
    check_hermitian(A)
    w, U = np.linalg.eigh(_dense(A))
    return HermitianEig(w, U)


def psd_sqrt(S) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-6, 0) * max|S|`` are treated as rounding noise and
    clamped to zero; anything more negative raises ``NotPSD``.
    """
    eig = hermitian_eig(S)
    scale = max_abs(S)
    lam = eig.eigenvalues
    if lam.size and lam.min() < -1e-6 * scale:
        raise NotPSD(f"smallest eigenvalue {lam.min():.3e} (max|S| = {scale:.3e})")
    lam = np.clip(lam, 0.0, None)
    U = eig.eigenvectors
    root = (U * np.sqrt(lam)) @ U.conj().T
    return 0.5 * (root + root.conj().T)


# --- time propagation -------------------------------------------------------

def herm_propagate(H, t: float, v, *, dense_max: int = DENSE_MAX, tol: float = KRYLOV_TOL,
                   krylov_dim: int = KRYLOV_DIM, check: bool = True) -> np.ndarray:
    """Return ``exp(-i H t) v`` for Hermitian ``H``.

    Small problems go through a dense eigendecomposition. Larger ones use a
    Lanczos propagator with full reorthogonalization and adaptive substeps,
    each substep keeping the a posteriori error estimate below
    ``tol * ||v||``. Both routes preserve the 2-norm to rounding.
    """
    v = np.asarray(v, dtype=complex)
    if H.shape[0] != v.shape[0]:
        raise ValueError(f"dimension mismatch: H is {H.shape}, v has length {v.shape[0]}")
    if check:
        check_hermitian(H)
    if t == 0 or not np.any(v):
        return v.copy()
    if H.shape[0] <= dense_max:
        w, U = np.linalg.eigh(_dense(H))
        return U @ (np.exp(-1j * w * t) * (U.conj().T @ v))
    return _lanczos_propagate(H, t, v, tol=tol, m=krylov_dim)


def _lanczos_basis(H, v, m):
    n = v.shape[0]
    beta0 = np.linalg.norm(v)
    V = np.empty((n, m + 1), dtype=complex)
    V[:, 0] = v / beta0
    alpha = np.zeros(m)
    beta = np.zeros(m)
    scale = 0.0
    for j in range(m):
        w = H @ V[:, j]
        alpha[j] = np.vdot(V[:, j], w).real
        # two passes of classical Gram-Schmidt against the whole basis
        Vj = V[:, : j + 1]
        w = w - Vj @ (Vj.conj().T @ w)
        w = w - Vj @ (Vj.conj().T @ w)
        beta[j] = np.linalg.norm(w)
        scale = max(scale, abs(alpha[j]), beta[j])
        if beta[j] <= 1e-12 * max(scale, 1.0):
            # invariant subspace: the projection is exact
            return V[:, : j + 1], alpha[: j + 1], beta[:j], 0.0, beta0
        V[:, j + 1] = w / beta[j]
    return V[:, :m], alpha, beta[: m - 1], beta[m - 1], beta0


def _lanczos_propagate(H, t, v, *, tol, m):
    sign = 1.0 if t > 0 else -1.0
    remaining = abs(t)
    out = v.copy()
    tau_floor = 1e-13 * abs(t)
    while remaining > 0:
        V, alpha, beta, beta_next, nrm = _lanczos_basis(H, out, m)
        k = alpha.size
        T = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
        theta, Q = np.linalg.eigh(T)
        q0 = Q[0, :]

        def coeffs(tau):
            return Q @ (np.exp(-1j * sign * theta * tau) * q0)

        def err(tau):
            return nrm * beta_next * abs(coeffs(tau)[k - 1])

        target = tol * nrm
        tau = remaining
        if beta_next > 0 and err(tau) > target:
            lo, hi = 0.0, tau
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if err(mid) <= target:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-6 * hi:
                    break
            tau = lo
            if tau <= tau_floor:
                raise KrylovBreakdown(
                    f"cannot meet tolerance {tol:g} with a {m}-dimensional Krylov space"
                )
        out = nrm * (V @ coeffs(tau))
        remaining -= tau
        if remaining < tau_floor:
            remaining = 0.0
    return out


def general_propagate(L, t: float, v, dt: float | None = None) -> np.ndarray:
    """Classical RK4 solution of ``dphi/dt = L phi`` from 0 to ``t``.

    ``dt`` defaults to ``0.5 / ||L||_1``; the actual step is shrunk so an
    integer number of steps lands exactly on ``t``.
    """
    v = np.asarray(v, dtype=complex)
    if t == 0:
        return v.copy()
    norm1 = colsum_norm(L)
    if norm1 == 0:
        return v.copy()
    if dt is None:
        dt = 0.5 / norm1
    if dt <= 0:
        raise ValueError("dt must be positive")
    if dt * norm1 > 1.0 + 1e-12:
        raise ValueError(f"dt * ||L||_1 = {dt * norm1:.3g} > 1 is outside the RK4 stability heuristic")
    nsteps = max(1, int(np.ceil(abs(t) / dt - 1e-9)))
    h = t / nsteps
    y = v.copy()
    prev = np.linalg.norm(y)
    for _ in range(nsteps):
        k1 = L @ y
        k2 = L @ (y + 0.5 * h * k1)
        k3 = L @ (y + 0.5 * h * k2)
        k4 = L @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        cur = np.linalg.norm(y)
        if cur > 10.0 * prev and prev > 0:
            raise UnstableStep(f"state norm grew from {prev:.3e} to {cur:.3e} in one step")
        prev = cur
    return y
