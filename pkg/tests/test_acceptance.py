"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances marked "pinned" were fixed from the development oracle runs with a
margin of roughly 25 percent; all other thresholds are the stated ones.
Run on its own with ``pytest tests/test_acceptance.py -v`` (the summary lines
appear in the "acceptance criteria" section at the end).
"""
import time

import numpy as np
import pytest

from conftest import record
from schrabc import analysis, pipeline
from schrabc.abc_dtn import ab_generator, build_dtn_generator, dtn_G, dtn_R, embed_state, pade1_coefficients, partition_matrix
from schrabc.config import parse_config
from schrabc.discretization import default_potential, fd_matrices, hamiltonian_2d
from schrabc.generator import Generator, assemble, hermitian_split
from schrabc.numerics import general_propagate, hermitian_defect, max_abs
from schrabc.reference import direct_solve, direct_step, naive_dirichlet, truth_solution
from schrabc.schrodingerization import build_pgrid, evolve_modes, p_fourier, simulate, warp_initial

TIMES = [0.3, 0.6, 0.9]
FIDELITY_TOL = {  # pinned: rel_l2 at N = 32, M = 32 per output time
    "cap": [0.002, 0.002, 0.003],
    "pml": [0.025, 0.065, 0.12],
    "dtn1": [0.002, 0.002, 0.0025],
}
QUALITY_TOL = {"cap": 0.22, "pml": 0.16, "dtn1": 0.42}  # pinned: rel_l2 vs truth at t = 0.9, N = 64


def problem(abc, **kw):
    return pipeline.build_problem(parse_config({"abc": abc, **kw}))


# 1 ---------------------------------------------------------------------------
def test_criterion_1_hermiticity_and_round_trip():
    t0 = time.perf_counter()
    worst_defect, worst_round = 0.0, 0.0
    for abc in ("cap", "pml", "dtn0", "dtn1"):
        prob = problem(abc, N=16)  # DtN box [-6, 6] at the same spacing
        pair = hermitian_split(prob.generator)
        for H in (pair.H0, pair.H1):
            scale = max_abs(H)
            if scale:
                worst_defect = max(worst_defect, hermitian_defect(H) / scale)
        L = prob.generator.L
        worst_round = max(worst_round, max_abs(assemble(pair).L - L) / max_abs(L))
    dt = time.perf_counter() - t0
    ok = worst_defect <= 1e-12 and worst_round <= 1e-13 and dt < 10
    record(1, ok, f"max rel Hermitian defect {worst_defect:.1e} (<=1e-12), round trip {worst_round:.1e} "
                  f"(<=1e-13), {dt:.1f} s (<10 s)")
    assert ok


# 2 ---------------------------------------------------------------------------
def test_criterion_2_mode_unitarity():
    pg = build_pgrid(-5, 5, 32)
    worst = 0.0
    for abc in ("cap", "pml", "dtn1"):
        prob = problem(abc, N=32)
        s = p_fourier(warp_initial(prob.psi0, pg), "forward")
        out = evolve_modes(s, prob.pair, 0.9, pg)
        before = np.linalg.norm(s.blocks, axis=1)
        after = np.linalg.norm(out.blocks, axis=1)
        worst = max(worst, float(np.max(np.abs(after - before) / before)))
    ok = worst <= 1e-8
    record(2, ok, f"max per-mode relative norm drift {worst:.1e} over t=0.9 (<=1e-8)")
    assert ok


# 3 ---------------------------------------------------------------------------
@pytest.fixture(scope="module")
def fidelity():
    rows = {}
    for abc in ("cap", "pml", "dtn1"):
        prob = problem(abc, N=32)
        ref = [prob.physical(s) for s in direct_solve(prob.generator, prob.psi0, TIMES)]
        errs = {}
        for M in (32, 64):
            out = simulate(prob.pair, prob.psi0, build_pgrid(-5, 5, M), TIMES)
            errs[M] = [analysis.rel_error(prob.physical(o), r)[0] for o, r in zip(out, ref)]
        rows[abc] = errs
    return rows


def test_criterion_3_schrodingerization_fidelity(fidelity):
    parts, ok = [], True
    for abc, errs in fidelity.items():
        within = all(e <= tol for e, tol in zip(errs[32], FIDELITY_TOL[abc]))
        ratios = [a / b for a, b in zip(errs[32], errs[64])]
        first_order = all(1.5 <= r <= 3 for r in ratios)
        ok &= within and first_order
        parts.append(f"{abc}: M=32 err {', '.join(f'{e:.2e}' for e in errs[32])} "
                     f"({'within' if within else 'ABOVE'} pinned tol); "
                     f"M=32/M=64 ratios {', '.join(f'{r:.2f}' for r in ratios)} (need [1.5, 3])")
    record(3, ok, " | ".join(parts))
    assert ok, parts


# 4 ---------------------------------------------------------------------------
@pytest.fixture(scope="module")
def quality():
    out = {}
    for abc in ("cap", "pml", "dtn1"):
        prob = problem(abc)
        out[abc] = prob.physical(direct_solve(prob.generator, prob.psi0, 0.9))
    g = prob.grid
    psi0 = prob.physical(prob.psi0)
    truth = truth_solution(g, psi0, default_potential, 0.9)
    naive = naive_dirichlet(g, psi0, default_potential, 0.9)
    X, Y = g.mesh()
    inner = ((np.abs(X) <= 2.2) & (np.abs(Y) <= 2.2)).ravel()
    return out, truth, naive, inner


def test_criterion_4_abc_quality(quality):
    out, truth, naive, inner = quality
    parts, ok = [], True
    for abc, psi in out.items():
        # the absorbing layer of CAP and PML is not physical: compare on the inner box
        m = inner if abc in ("cap", "pml") else np.ones_like(inner)
        err = analysis.rel_error(psi[m], truth[m])[0]
        base = analysis.rel_error(naive[m], truth[m])[0]
        good = err <= QUALITY_TOL[abc]
        beats = base >= 5 * err
        ok &= good and beats
        parts.append(f"{abc}: {err:.3f} vs truth (pinned <= {QUALITY_TOL[abc]}), naive {base:.3f}, "
                     f"gain {base / err:.2f}x (need >= 5x)")
    record(4, ok, " | ".join(parts))
    assert ok, parts


# 5 ---------------------------------------------------------------------------
def test_criterion_5_dissipativity():
    prob = problem("cap", N=32)
    g = prob.generator
    dt = direct_step(g)
    n = int(np.ceil(0.9 / dt))
    times = np.arange(1, n + 1) * (0.9 / n)
    # one RK4 step per output time
    norms = [np.linalg.norm(prob.psi0)] + [np.linalg.norm(s) for s in direct_solve(g, prob.psi0, times)]
    worst_rise = max((b - a) / a for a, b in zip(norms, norms[1:]))
    H = hamiltonian_2d(prob.grid, prob.V)
    free = direct_solve(Generator((-1j * H).tocsr()), prob.psi0, 0.9)
    drift = abs(np.linalg.norm(free) / np.linalg.norm(prob.psi0) - 1)
    ok = worst_rise <= 1e-9 and drift <= 1e-10
    record(5, ok, f"largest per-step relative norm increase {worst_rise:.1e} over {n} steps (<=1e-9); "
                  f"W=0 norm drift {drift:.1e} (<=1e-10)")
    assert ok


# 6 ---------------------------------------------------------------------------
def test_criterion_6_dtn_toy_chain():
    _, Dxx = fd_matrices(3, 1.0)
    part = partition_matrix(-0.5 * Dxx, [True, True, False])
    R = dtn_R(part, 1.0)[0, 0]
    G0, G1 = (G[0, 0] for G in dtn_G(part, 1.0))
    g, pair, se = build_dtn_generator(part, 1.0, 1)
    A, B = (X[0, 0] for X in pade1_coefficients(se))
    sigma = se.Sigma_gg[0, 0]
    h1 = pair.H1.toarray()[2, 2]
    checks = {
        "R": abs(R - (-0.125 - 0.125j)), "G0": abs(G0 - 0.125), "G1": abs(G1 - 0.125),
        "Sigma_gg=i": abs(sigma - 1j), "A": abs(A + 0.25j), "B": abs(B + 1j), "H1_gg": abs(h1),
    }
    gab = ab_generator(part, se)
    x0 = embed_state(part, np.array([1.0, 0.5j]), 1)
    traj = 0.0
    for t in (0.25, 0.5, 1.0):
        a = general_propagate(g.L, t, x0, dt=1e-3)
        b = general_propagate(gab.L, t, x0, dt=1e-3)
        traj = max(traj, np.linalg.norm(a[:2] - b[:2]) / np.linalg.norm(b[:2]),
                   abs(se.S_half[0, 0] * a[2] - b[2]) / max(abs(b[2]), 1e-300))
    bad = [k for k, v in checks.items() if v > 1e-12]
    ok = not bad and traj <= 1e-8
    record(6, ok, f"values off by more than 1e-12: {bad or 'none'} (computed Sigma_gg = {sigma:.12g}); "
                  f"(A,B) trajectory mismatch {traj:.1e} (<=1e-8)")
    assert ok, checks


# 7 ---------------------------------------------------------------------------
def test_criterion_7_complexity_scaling():
    # dp proportional to dx^2: dx halves (N+1 doubles) while M quadruples
    h, s = {}, {}
    for N, M in ((63, 64), (127, 256)):
        prob = problem("cap", N=N)
        h[N], _, s[N] = analysis.schrodingerized_norms(prob.pair, build_pgrid(-5, 5, M).modes)
    for N in (15, 31):
        _, _, s[N] = analysis.schrodingerized_norms(problem("cap", N=N).pair, build_pgrid(-5, 5, 64).modes)
    ratio = h[127] / h[63]
    q = analysis.query_complexity(5, 100, 1e-3)
    ok_ratio = 3.5 <= ratio <= 4.5
    ok_sparse = max(s.values()) <= 6
    ok_q = abs(q - 2685.5) <= 0.1
    record(7, ok_ratio and ok_sparse and ok_q,
           f"h_max ratio {ratio:.3f} for N 63->127, M 64->256 (need [3.5, 4.5]); "
           f"sparsity {sorted(s.items())} (<=6); query_complexity(5, 100, 1e-3) = {q:.3f} (need 2685.5 +- 0.1)")
    assert ok_ratio and ok_sparse and ok_q


# 8 ---------------------------------------------------------------------------
def test_criterion_8_effective_sparsity():
    prob = problem("dtn1")
    sig = prob.extras["self_energy"].Sigma_gg
    n_gamma = sig.shape[0]
    s1, s2 = analysis.effective_sparsity(sig, 0.01), analysis.effective_sparsity(sig, 0.02)
    fr = [analysis.band_fraction(analysis.above_cut_mask(sig, c), 5) for c in (0.01, 0.02)]
    ok = s2 <= s1 <= n_gamma and min(fr) >= 0.9
    record(8, ok, f"s_eff(2%)={s2} <= s_eff(1%)={s1} <= |Gamma|={n_gamma}; "
                  f"share within bandwidth 5: {fr[0]:.3f} (1%), {fr[1]:.3f} (2%) (need >= 0.9)")
    assert ok


# 9 ---------------------------------------------------------------------------
def test_criterion_9_full_scale_run():
    t0 = time.perf_counter()
    cfg = parse_config({"abc": "cap", "N": 64, "M": 64, "method": "schrodingerized"})
    _, snaps, _ = pipeline.run(cfg)
    dt = time.perf_counter() - t0
    ok = dt <= 600 and len(snaps) == 3 and all(np.all(np.isfinite(s.psi)) for s in snaps)
    record(9, ok, f"N = M = 64 lifted CAP run to t = 0.3, 0.6, 0.9 took {dt:.1f} s (<=600 s); "
                  "whole-suite runtime is reported in the summary")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
