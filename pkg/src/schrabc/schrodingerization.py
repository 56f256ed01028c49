"""Warped-phase lift of ``dphi/dt = -i H0 phi - H1 phi`` to a Hermitian system.

The state is extended along an auxiliary variable ``p`` with initial profile
``exp(-|p|) phi0``. In the Fourier basis along ``p`` the extended system
decouples into one Schrodinger equation per mode ``mu_l``:

    d/dt w_l = -i (H0 - mu_l H1) w_l

and the physical state is read back as the integral of the extension over
``p >= 0``.

DFT convention: ``Phi[j, l] = exp(i mu_l (p_j - a))`` with modes ordered
``l = -M/2 .. M/2-1`` and ``Phi^{-1} = Phi^H / M``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .errors import BadInterval, BasisMismatch, OddM
from .generator import HermitianPair
from .numerics import DENSE_MAX, herm_propagate

P_SPACE = "p"
MODE_SPACE = "mode"


@dataclass(frozen=True)
class PGrid:
    a: float = -5.0
    b: float = 5.0
    M: int = 64

    @property
    def dp(self) -> float:
        return (self.b - self.a) / self.M

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.dp * np.arange(self.M)

    @property
    def mode_index(self) -> np.ndarray:
        return np.arange(-self.M // 2, self.M // 2)

    @property
    def modes(self) -> np.ndarray:
        return 2 * np.pi * self.mode_index / (self.b - self.a)

    @property
    def zero_index(self) -> int:
        return int(round(-self.a / self.dp))

    def dft_matrix(self) -> np.ndarray:
        """Explicit ``Phi``; only for tests and small ``M``."""
        return np.exp(1j * np.outer(self.nodes - self.a, self.modes))


def build_pgrid(a: float = -5.0, b: float = 5.0, M: int = 64, truncation_tol: float = 1e-2) -> PGrid:
    if not (a < 0 < b):
        raise BadInterval(f"need a < 0 < b, got [{a}, {b}]")
    if int(M) != M or M < 2:
        raise OddM(f"M must be a positive even integer, got {M!r}")
    if M % 2:
        raise OddM(f"M must be even, got {M}")
    pg = PGrid(float(a), float(b), int(M))
    k = -pg.a / pg.dp
    if abs(k - round(k)) > 1e-9:
        raise BadInterval(f"p = 0 is not a grid node for [{a}, {b}] with M = {M}")
    if max(np.exp(-abs(a)), np.exp(-abs(b))) > truncation_tol:
        warnings.warn(f"exp(-|p|) at the ends of [{a}, {b}] exceeds {truncation_tol:g}; "
                      "the truncation bias will be visible", stacklevel=2)
    return pg


@dataclass(frozen=True)
class WarpedState:
    blocks: np.ndarray  # shape (M, n): one row per p-node or per mode
    basis: str

    @property
    def M(self) -> int:
        return self.blocks.shape[0]

    @property
    def n(self) -> int:
        return self.blocks.shape[1]


def warp_initial(psi0, pg: PGrid) -> WarpedState:
    psi0 = np.asarray(psi0, dtype=complex)
    weights = np.exp(-np.abs(pg.nodes))
    return WarpedState(weights[:, None] * psi0[None, :], P_SPACE)


def p_fourier(s: WarpedState, direction: str) -> WarpedState:
    """Apply ``Phi^{-1}`` (``"forward"``) or ``Phi`` (``"inverse"``) along ``p``."""
    if direction == "forward":
        if s.basis != P_SPACE:
            raise BasisMismatch("forward transform needs a p-space state")
        # Phi^{-1} w = (1/M) sum_j exp(-2 pi i l j / M) w_j, l = -M/2..M/2-1
        out = np.fft.fftshift(np.fft.fft(s.blocks, axis=0), axes=0) / s.M
        return WarpedState(out, MODE_SPACE)
    if direction == "inverse":
        if s.basis != MODE_SPACE:
            raise BasisMismatch("inverse transform needs a mode-space state")
        out = np.fft.ifft(np.fft.ifftshift(s.blocks, axes=0), axis=0) * s.M
        return WarpedState(out, P_SPACE)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def mode_hamiltonian(pair: HermitianPair, mu: float):
    H = pair.H0 - mu * pair.H1
    return H.tocsr() if sp.issparse(H) else H


def evolve_modes(s: WarpedState, pair: HermitianPair, t: float, pg: PGrid | None = None, *,
                 dense_max: int = DENSE_MAX) -> WarpedState:
    """Propagate each Fourier mode ``l`` by ``exp(-i (H0 - mu_l H1) t)``."""
    if s.basis != MODE_SPACE:
        raise BasisMismatch("evolve_modes needs a mode-space state")
    if pair.n != s.n:
        raise ValueError(f"pair acts on dimension {pair.n}, state blocks have length {s.n}")
    if pg is None:
        raise ValueError("evolve_modes needs the PGrid that defines the modes")
    if t == 0:
        return replace(s, blocks=s.blocks.copy())
    out = np.empty_like(s.blocks)
    for k, mu in enumerate(pg.modes):
        out[k] = herm_propagate(mode_hamiltonian(pair, mu), t, s.blocks[k], dense_max=dense_max,
                                check=(k == 0))
    return WarpedState(out, MODE_SPACE)


def recovery_weights(pg: PGrid) -> np.ndarray:
    """Trapezoid weights on the nodes ``0 <= p_k <= b - dp``; zero for ``p < 0``."""
    w = np.zeros(pg.M)
    k0 = pg.zero_index
    w[k0:] = pg.dp
    w[k0] = 0.5 * pg.dp
    w[-1] = 0.5 * pg.dp
    if k0 == pg.M - 1:
        w[k0] = 0.0
    return w


def quadrature_constant(pg: PGrid) -> float:
    """What ``recover`` returns per unit of ``psi0`` at ``t = 0``: the quadrature of ``exp(-p)``."""
    return float(recovery_weights(pg) @ np.exp(-np.abs(pg.nodes)))


def recover(s: WarpedState, pg: PGrid, renormalize: bool = False) -> np.ndarray:
    if s.basis != P_SPACE:
        raise BasisMismatch("recover needs a p-space state")
    psi = recovery_weights(pg) @ s.blocks
    if renormalize:
        psi = psi / quadrature_constant(pg)
    return psi


def simulate(pair: HermitianPair, psi0, pg: PGrid, t, *, renormalize: bool = False,
             dense_max: int = DENSE_MAX):
    """End-to-end lift, evolve and recover.

    ``t`` may be a scalar or an increasing sequence of times; in the latter case
    a list of states is returned and the mode-space state is advanced from one
    output time to the next.
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("times must be nonnegative and nondecreasing")
    state = p_fourier(warp_initial(psi0, pg), "forward")
    out = []
    now = 0.0
    for tk in times:
        state = evolve_modes(state, pair, tk - now, pg, dense_max=dense_max)
        now = tk
        out.append(recover(p_fourier(state, "inverse"), pg, renormalize))
    return out if np.ndim(t) else out[0]
