"""Cost and error metrics: max-norms, sparsity, query-count estimates, error norms.

The Hermitian system produced by the p-lift is ``H = H0 (x) I - H1 (x) D_mu``
with the physical index slow and the mode index fast. ``D_mu`` is diagonal, so
row ``(i, l)`` of ``H`` holds the entries ``H0[i, j] - mu_l H1[i, j]``. Norms
and sparsity are computed mode by mode without forming the Kronecker product;
``schrodingerized_matrix`` builds it explicitly for small brute-force checks.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateLog, ZeroReference
from .generator import HermitianPair
from .numerics import max_abs

NNZ_RTOL = 1e-14


@dataclass(frozen=True)
class ComplexityReport:
    h_max: float
    h_max1: float
    sparsity: int
    s_eff_1pct: int
    s_eff_2pct: int
    query_estimate: float
    analytic_bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def _row_counts(A, threshold: float) -> np.ndarray:
    if sp.issparse(A):
        A = sp.csr_matrix(A)
        mask = sp.csr_matrix((np.abs(A.data) > threshold, A.indices, A.indptr), shape=A.shape)
        return np.asarray(mask.sum(axis=1)).ravel().astype(int)
    return (np.abs(np.asarray(A)) > threshold).sum(axis=1)


def matrix_norms(H, T: float = 1.0) -> tuple[float, float, int]:
    """``(h_max, T * h_max, max nonzeros per row)``; entries below ``1e-14 h_max`` do not count."""
    h = max_abs(H)
    if h == 0:
        return 0.0, 0.0, 0
    counts = _row_counts(H, NNZ_RTOL * h)
    return h, T * h, int(counts.max())


def schrodingerized_matrix(pair: HermitianPair, modes) -> sp.csr_matrix:
    """Explicit ``H0 (x) I - H1 (x) diag(modes)``; size ``n * M``, so keep it small."""
    modes = np.asarray(modes, dtype=float)
    I = sp.identity(modes.size, format="csr")
    H0 = sp.csr_matrix(pair.H0)
    H1 = sp.csr_matrix(pair.H1)
    return (sp.kron(H0, I) - sp.kron(H1, sp.diags(modes))).tocsr()


def _mode_matrices(pair: HermitianPair, modes):
    for mu in np.asarray(modes, dtype=float):
        H = pair.H0 - mu * pair.H1
        yield sp.csr_matrix(H) if sp.issparse(H) else np.asarray(H)


def schrodingerized_hmax(pair: HermitianPair, modes) -> float:
    """``max_{i,j,l} |H0_ij - mu_l H1_ij|``.

    For fixed ``(i, j)`` the magnitude is convex in ``mu``, so only the two
    extreme modes need checking.
    """
    modes = np.asarray(modes, dtype=float)
    if modes.size == 0:
        return 0.0
    return max(max_abs(pair.H0 - mu * pair.H1) for mu in (modes.min(), modes.max()))


def schrodingerized_norms(pair: HermitianPair, modes, T: float = 1.0) -> tuple[float, float, int]:
    """``matrix_norms`` of the lifted Hamiltonian, computed mode by mode."""
    h = schrodingerized_hmax(pair, modes)
    if h == 0:
        return 0.0, 0.0, 0
    s = 0
    for Hl in _mode_matrices(pair, modes):
        s = max(s, int(_row_counts(Hl, NNZ_RTOL * h).max()))
    return h, T * h, s


def query_complexity(s: float, h_max1: float, eps: float) -> float:
    """``s h log(s h / eps) / log(log(h / eps))`` in natural logs, constants dropped.

    This is an order-of-magnitude estimate, not an operation count.
    """
    if eps <= 0 or h_max1 <= 0 or s <= 0:
        raise DegenerateLog(f"need s, h_max1, eps > 0, got {s}, {h_max1}, {eps}")
    r = h_max1 / eps
    if r <= np.e:
        raise DegenerateLog(f"h_max1 / eps = {r:.4g} must exceed e for the double logarithm")
    return float(s * h_max1 * np.log(s * h_max1 / eps) / np.log(np.log(r)))


def table1_bound(abc: str, T: float, dx: float, V_max1: float = 0.0, W_max: float = 0.0,
                 sigma_max: float = 0.0, s_sigma: float = 1.0) -> float:
    """Analytic cost bound with unit constants.

    cap:  T/dx^2 + |V|_max,1 + T |W|_max / dx^2
    pml:  T/dx^2 + |V|_max,1 + T |sigma|_max / dx^3
    dtn:  s_Sigma (T/dx^2 + |V|_max,1)
    """
    if min(T, dx, V_max1, W_max, sigma_max, s_sigma) < 0 or dx == 0:
        raise ValueError("all parameters must be nonnegative and dx > 0")
    kin = T / dx**2
    if abc == "cap":
        return kin + V_max1 + T * W_max / dx**2
    if abc == "pml":
        return kin + V_max1 + T * sigma_max / dx**3
    if abc in ("dtn", "dtn0", "dtn1"):
        return s_sigma * (kin + V_max1)
    raise ValueError(f"unknown boundary treatment {abc!r}")


def cap_hmax_bound(dx: float, V_max: float, W_max: float, dp: float, mode_factor: float = np.pi) -> float:
    """Entrywise bound for the lifted CAP Hamiltonian.

    The largest mode is ``|mu| = pi / dp``, hence the default ``mode_factor``;
    ``mode_factor = 1`` gives the ``|W|/dp`` reading of the bound.
    """
    return 2.0 / dx**2 + V_max + mode_factor * W_max / dp


def above_cut_mask(M, cut: float) -> np.ndarray:
    if not 0 < cut < 1:
        raise ValueError(f"cut must lie in (0, 1), got {cut}")
    A = np.abs(M.toarray() if sp.issparse(M) else np.asarray(M))
    top = A.max() if A.size else 0.0
    return A > cut * top if top > 0 else np.zeros(A.shape, dtype=bool)


def effective_sparsity(M, cut: float) -> int:
    """Max over rows of the number of entries above ``cut * max|M|``."""
    mask = above_cut_mask(M, cut)
    return int(mask.sum(axis=1).max()) if mask.size else 0


def lifted_effective_sparsity(pair: HermitianPair, modes, cut: float) -> int:
    """``effective_sparsity`` of the lifted Hamiltonian, cut relative to its global ``h_max``."""
    if not 0 < cut < 1:
        raise ValueError(f"cut must lie in (0, 1), got {cut}")
    h = schrodingerized_hmax(pair, modes)
    if h == 0:
        return 0
    return max(int(_row_counts(Hl, cut * h).max()) for Hl in _mode_matrices(pair, modes))


def band_fraction(mask: np.ndarray, bandwidth: int) -> float:
    """Share of ``True`` entries with ``|i - j| <= bandwidth``."""
    i, j = np.nonzero(mask)
    if i.size == 0:
        return 1.0
    return float(np.mean(np.abs(i - j) <= bandwidth))


def rel_error(a, b) -> tuple[float, float]:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    nb = np.linalg.norm(b)
    if nb == 0:
        raise ZeroReference("reference vector is zero")
    d = a - b
    return float(np.linalg.norm(d) / nb), float(np.abs(d).max()) if d.size else 0.0
