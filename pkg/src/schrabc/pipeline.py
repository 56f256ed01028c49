"""Experiment orchestration shared by the command line and the acceptance tests."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .abc_cap import CapProfile, build_cap_generator, cap_potential
from .abc_dtn import build_dtn_generator, dtn_problem, embed_state
from .abc_pml import PmlProfile, build_pml_generator, pml_initial_state, pml_sigma
from .config import RunConfig
from .discretization import Grid2D, build_grid, default_potential, initial_wavepacket, sample_field
from .generator import Generator, HermitianPair, assemble
from .reference import direct_solve
from .schrodingerization import PGrid, build_pgrid, simulate


@dataclass
class Problem:
    """A built boundary treatment: generator, Hermitian pair and the initial state.

    ``grid`` is the grid on which snapshots are reported; the first ``grid.n``
    entries of a state are the physical field there.
    """
    abc: str
    grid: Grid2D
    generator: Generator
    pair: HermitianPair
    psi0: np.ndarray  # padded to the generator dimension
    V: np.ndarray
    extras: dict = field(default_factory=dict)

    def physical(self, state) -> np.ndarray:
        return np.asarray(state)[: self.grid.n]


def potential_fn(cfg: RunConfig):
    return default_potential if cfg.potential == "default" else None


def build_problem(cfg: RunConfig) -> Problem:
    grid = build_grid(cfg.domain, cfg.N)
    vf = potential_fn(cfg)
    V = sample_field(vf, grid).astype(float) if vf is not None else np.zeros(grid.n)
    psi0 = initial_wavepacket(grid)
    if cfg.abc == "cap":
        prof = CapProfile(**cfg.cap.model_dump())
        W = cap_potential(prof, grid)
        pair = build_cap_generator(grid, V, W)
        return Problem("cap", grid, assemble(pair, "cap"), pair, psi0, V, {"W": W})
    if cfg.abc == "pml":
        prof = PmlProfile(**cfg.pml.model_dump())
        L, pair = build_pml_generator(grid, V, prof)
        sx, sy = pml_sigma(prof, grid)
        return Problem("pml", grid, Generator(L, "pml"), pair, pml_initial_state(psi0), V,
                       {"sigma_max": float(max(np.abs(sx).max(initial=0), np.abs(sy).max(initial=0)))})
    order = 0 if cfg.abc == "dtn0" else 1
    grid_D, part = dtn_problem(grid, cfg.dtn.D_bounds, vf)
    g, pair, se = build_dtn_generator(part, cfg.dtn.s0, order)
    return Problem(cfg.abc, grid, g, pair, embed_state(part, psi0, order), V,
                   {"grid_D": grid_D, "partition": part, "self_energy": se})


def pgrid_for(cfg: RunConfig, M: int | None = None) -> PGrid:
    a, b = cfg.p_interval
    return build_pgrid(a, b, cfg.M if M is None else M)


@dataclass
class Snapshot:
    method: str
    time: float
    psi: np.ndarray  # physical field on the reporting grid
    seconds: float


def run_direct(prob: Problem, times) -> list[Snapshot]:
    t0 = time.perf_counter()
    states = direct_solve(prob.generator, prob.psi0, list(times))
    dt = (time.perf_counter() - t0) / max(len(times), 1)
    return [Snapshot("direct", float(t), prob.physical(s), dt) for t, s in zip(times, states)]


def run_schrodingerized(prob: Problem, pg: PGrid, times, *, renormalize=False,
                        dense_max=512) -> list[Snapshot]:
    t0 = time.perf_counter()
    states = simulate(prob.pair, prob.psi0, pg, list(times), renormalize=renormalize,
                      dense_max=dense_max)
    dt = (time.perf_counter() - t0) / max(len(times), 1)
    return [Snapshot("schrodingerized", float(t), prob.physical(s), dt) for t, s in zip(times, states)]


def run(cfg: RunConfig, prob: Problem | None = None) -> tuple[Problem, list[Snapshot], list[dict]]:
    """Evolve per ``cfg.method``; when both methods run, also compare them per time."""
    prob = prob or build_problem(cfg)
    snaps: list[Snapshot] = []
    direct = schr = None
    if cfg.method in ("direct", "both"):
        direct = run_direct(prob, cfg.times)
        snaps += direct
    if cfg.method in ("schrodingerized", "both"):
        schr = run_schrodingerized(prob, pgrid_for(cfg), cfg.times, renormalize=cfg.renormalize,
                                   dense_max=cfg.dense_max)
        snaps += schr
    comparisons = []
    if direct and schr:
        for d, s in zip(direct, schr):
            if np.any(d.psi):
                rel, mx = analysis.rel_error(s.psi, d.psi)
                comparisons.append({"time": d.time, "rel_l2": rel, "max_abs": mx})
    return prob, snaps, comparisons


def convergence(cfg: RunConfig, prob: Problem | None = None) -> list[dict]:
    """``rel_l2`` of the lifted solution against the direct one for each ``M``."""
    prob = prob or build_problem(cfg)
    t = cfg.convergence.time
    ref = prob.physical(direct_solve(prob.generator, prob.psi0, t))
    rows = []
    for M in cfg.convergence.M_values:
        pg = pgrid_for(cfg, M)
        psi = prob.physical(simulate(prob.pair, prob.psi0, pg, t, renormalize=cfg.renormalize,
                                     dense_max=cfg.dense_max))
        rel, _ = analysis.rel_error(psi, ref)
        rows.append({"M": M, "dp": pg.dp, "rel_l2": rel, "under_resolved": M < 8})
    return rows


def complexity(cfg: RunConfig, prob: Problem | None = None) -> tuple[analysis.ComplexityReport, dict]:
    """Measured cost figures of the lifted Hamiltonian plus the analytic bound."""
    prob = prob or build_problem(cfg)
    pg = pgrid_for(cfg)
    T = max(cfg.times)
    h, h1, s = analysis.schrodingerized_norms(prob.pair, pg.modes, T)
    diag: dict = {"abc": prob.abc, "n": prob.generator.n, "M": pg.M, "dp": pg.dp, "dx": prob.grid.dx, "T": T}
    V_max = float(np.abs(prob.V).max(initial=0.0))
    if prob.abc in ("dtn0", "dtn1"):
        se = prob.extras["self_energy"]
        target = se.Sigma_gg
        s1 = analysis.effective_sparsity(target, 0.01)
        s2 = analysis.effective_sparsity(target, 0.02)
        bound = analysis.table1_bound("dtn", T, prob.grid.dx, T * V_max, s_sigma=s1)
        diag.update({
            "n_gamma": int(se.Sigma_gg.shape[0]),
            "G0_max": analysis.max_abs(se.G0), "G1_max": analysis.max_abs(se.G1),
            "band_fraction_1pct": analysis.band_fraction(analysis.above_cut_mask(target, 0.01), 5),
            "band_fraction_2pct": analysis.band_fraction(analysis.above_cut_mask(target, 0.02), 5),
        })
    else:
        s1 = analysis.lifted_effective_sparsity(prob.pair, pg.modes, 0.01)
        s2 = analysis.lifted_effective_sparsity(prob.pair, pg.modes, 0.02)
        if prob.abc == "cap":
            W_max = float(np.abs(prob.extras["W"]).max(initial=0.0))
            bound = analysis.table1_bound("cap", T, prob.grid.dx, T * V_max, W_max=W_max)
            diag["W_max"] = W_max
            diag["entry_bound_with_pi"] = analysis.cap_hmax_bound(prob.grid.dx, V_max, W_max, pg.dp)
            diag["entry_bound_without_pi"] = analysis.cap_hmax_bound(prob.grid.dx, V_max, W_max, pg.dp, 1.0)
        else:
            sig = prob.extras["sigma_max"]
            bound = analysis.table1_bound("pml", T, prob.grid.dx, T * V_max, sigma_max=sig)
            diag["sigma_max"] = sig
    q = analysis.query_complexity(s, h1, cfg.complexity.eps)
    diag["V_max"] = V_max
    return analysis.ComplexityReport(h, h1, s, s1, s2, q, bound), diag
