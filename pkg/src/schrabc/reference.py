"""Ground truth for the boundary treatments.

``direct_solve`` integrates a generator as-is with RK4. ``truth_solution``
evolves the free problem on a much larger node-aligned box, where nothing
reaches the frame within the simulated time, and samples it back on the
computational grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretization import Grid2D, embedding_indices, extend_grid, hamiltonian_2d, sample_field
from .errors import MassReachedFrame
from .generator import Generator
from .numerics import colsum_norm, general_propagate, herm_propagate

DIRECT_DT_FACTOR = 0.025


@dataclass(frozen=True)
class TruthConfig:
    big_bounds: tuple = (-12.0, 12.0)
    t_max: float = 0.9
    frame_band: int = 3  # nodes next to the frame that must stay empty
    mass_tol: float = 1e-8


def direct_step(g: Generator) -> float:
    return DIRECT_DT_FACTOR / colsum_norm(g.L)


def direct_solve(g: Generator, psi0_ext, t, dt: float | None = None):
    """RK4 trajectory of ``g`` sampled at ``t`` (scalar or nondecreasing sequence)."""
    psi = np.asarray(psi0_ext, dtype=complex)
    if psi.shape[0] != g.n:
        raise ValueError(f"state length {psi.shape[0]} does not match generator dimension {g.n}")
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if dt is None and colsum_norm(g.L) > 0:
        dt = direct_step(g)
    out = []
    now = 0.0
    for tk in times:
        if tk < now:
            raise ValueError("times must be nondecreasing")
        psi = general_propagate(g.L, tk - now, psi, dt)
        now = tk
        out.append(psi)
    return out if np.ndim(t) else out[0]


def evolve_big(omega: Grid2D, psi0, V, t, cfg: TruthConfig = TruthConfig()):
    """Free evolution on the node-aligned box around ``omega``.

    Returns ``(big_grid, omega_indices, states)`` with one full big-grid state
    per output time. Raises ``MassReachedFrame`` when more than
    ``cfg.mass_tol`` of the norm sits next to the big frame at an output time.
    """
    big, _ = extend_grid(omega, cfg.big_bounds)
    idx = embedding_indices(omega, big)
    H = hamiltonian_2d(big, sample_field(V, big) if V is not None else None)
    psi = np.zeros(big.n, dtype=complex)
    psi[idx] = psi0
    band = _frame_band(big, cfg.frame_band)
    states = []
    now = 0.0
    for tk in np.atleast_1d(np.asarray(t, dtype=float)):
        psi = herm_propagate(H, tk - now, psi)
        now = tk
        total = np.vdot(psi, psi).real
        edge = np.vdot(psi[band], psi[band]).real
        if total > 0 and edge > cfg.mass_tol * total:
            raise MassReachedFrame(
                f"fraction {edge / total:.2e} of the norm reached the frame of {big.bounds()} at t = {tk}"
            )
        states.append(psi)
    return big, idx, states


def truth_solution(omega: Grid2D, psi0, V, t, cfg: TruthConfig = TruthConfig()):
    """Large-box solution sampled at ``omega``'s nodes (``V`` is a callable ``V(x, y)``)."""
    _, idx, states = evolve_big(omega, psi0, V, t, cfg)
    out = [s[idx].copy() for s in states]
    return out if np.ndim(t) else out[0]


def _frame_band(grid: Grid2D, width: int) -> np.ndarray:
    i = np.arange(grid.N)
    near = (i < width) | (i >= grid.N - width)
    return (near[:, None] | near[None, :]).ravel()


def naive_dirichlet(omega: Grid2D, psi0, V, t):
    """Free evolution with a zero Dirichlet frame directly on ``omega``."""
    H = hamiltonian_2d(omega, sample_field(V, omega) if V is not None else None)
    return direct_solve(Generator((-1j * H).tocsr(), "dirichlet"), psi0, t)
