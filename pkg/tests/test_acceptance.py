"""Acceptance criteria, one test each. Every test prints a PASS/FAIL line before asserting."""

import subprocess
import sys
import time
from math import pi

import numpy as np
import pytest

from qaoa_matching import graph as G
from qaoa_matching.analysis import (
    DEFAULT_BETAS,
    compare_vs_uniform,
    default_corpus,
    expected_matching_size,
    maximal_convergence_profile,
    orderings_for,
    random_trial_graphs,
)
from qaoa_matching.ansatz import ControlMode, Schedule, Semantics, apply_mixer_sweep, run_qaoa_plus
from qaoa_matching.matchings import closed_form_counts, convolve_counts, matching_mask
from qaoa_matching.statevector import StateVector, prepare_initial, support
from qaoa_matching.tree import build_forest, build_tree, eq15_table, leaf_census, verify_against_statevector

from oracles import brute_matchings, brute_phi_k, to_int

NB, SELF = ControlMode.NEIGHBORHOOD, ControlMode.INCLUDE_SELF


@pytest.fixture
def verdict(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}")
        assert ok, detail
    return emit


def _brute_set(g):
    return {to_int(s) for s in brute_matchings(list(g.edges))}


def _fixed_or_identity(g):
    try:
        return G.make_ordering(g, "fixed")
    except G.OrderingUndefined:
        return G.make_ordering(g, list(range(g.m)))


def _random_states(rng, m, count, mask=None):
    for _ in range(count):
        a = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
        if mask is not None:
            a = np.where(mask, a, 0)
        yield StateVector(m, a / np.linalg.norm(a))


def test_c01_unitarity(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    graphs = random_trial_graphs(seed=1)
    drift = 0.0
    for g in graphs:
        adj = G.edge_adjacency(g)
        for beta in DEFAULT_BETAS:
            for sv in _random_states(rng, g.m, 100):
                order = rng.permutation(g.m).tolist()
                _, n2 = apply_mixer_sweep(sv, beta, order, adj, NB)
                drift = max(drift, abs(n2 - 1))
    dt = time.perf_counter() - t0
    verdict("1", drift < 1e-10 and dt < 10, f"max norm drift {drift:.2e} over 6000 sweeps in {dt:.1f}s")


def test_c02_feasibility(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    leak = 0.0
    for g in random_trial_graphs(seed=2):
        adj = G.edge_adjacency(g)
        mask = matching_mask(g)
        inputs = [prepare_initial("empty", g.m), prepare_initial("w1", g.m)]
        inputs += list(_random_states(rng, g.m, 100, mask))
        for beta in DEFAULT_BETAS:
            for mode in ControlMode:
                for sv in inputs:
                    out, _ = apply_mixer_sweep(sv, beta, rng.permutation(g.m).tolist(), adj, mode)
                    leak = max(leak, float(np.max(np.abs(out.amps[~mask]), initial=0.0)))
    dt = time.perf_counter() - t0
    verdict("2", leak == 0.0 and dt < 30, f"max amplitude outside matchings {leak:.1e} in {dt:.1f}s")


def test_c03_empty_start_support(verdict):
    rng = np.random.default_rng(3)
    runs = mism = 0
    for g in default_corpus(seed=0):
        want = _brute_set(g)
        for order in orderings_for(g, rng):
            for beta in DEFAULT_BETAS:
                out = run_qaoa_plus(g, "empty", Schedule.single(beta), NB, order)
                mism += len(support(out.state, 1e-9) ^ want)
                runs += 1
    verdict("3", mism == 0, f"{mism} support mismatches over {runs} runs")


def test_c04_w1_start_support(verdict):
    rng = np.random.default_rng(4)
    runs = mism = 0
    worst_empty = 0.0
    for g in default_corpus(seed=0):
        want = _brute_set(g) - {0}
        for order in orderings_for(g, rng):
            for beta in DEFAULT_BETAS:
                for sem in Semantics:
                    out = run_qaoa_plus(g, "w1", Schedule.single(beta), SELF, order, sem)
                    got = set(np.flatnonzero(np.sqrt(out.distribution.probs) > 1e-9).tolist())
                    mism += len(got ^ want)
                    worst_empty = max(worst_empty, out.distribution[0])
                    runs += 1
    ok = mism == 0 and worst_empty < 1e-18
    verdict("4", ok, f"{mism} mismatches over {runs} runs, max P(empty) {worst_empty:.1e}")


def test_c05_counts(verdict):
    bad = []
    for g in default_corpus(seed=0):
        phi_k = brute_phi_k(list(g.edges))
        phi, phi_plus = sum(phi_k), sum(k * c for k, c in enumerate(phi_k))
        order = _fixed_or_identity(g)
        if leaf_census(build_tree(g, 0, 1.0, order))["leaves"] != phi:
            bad.append(f"{g.describe()} tree")
        if leaf_census(build_forest(g, 1.0, order))["leaves"] != phi_plus:
            bad.append(f"{g.describe()} forest")
    for n in range(3, 15):
        if list(closed_form_counts("cycle", n).phi_k) != brute_phi_k(list(G.cycle(n).edges)):
            bad.append(f"C{n}")
    for n in range(2, 15):
        if list(closed_form_counts("path", n).phi_k) != brute_phi_k(list(G.path(n).edges)):
            bad.append(f"P{n}")
    unions = 0
    for a in range(3, 14):
        for b in range(a, 17 - a):
            conv = convolve_counts([closed_form_counts("cycle", a), closed_form_counts("cycle", b)])
            unions += 1
            if list(conv.phi_k) != brute_phi_k(list(G.two_regular([a, b]).edges)):
                bad.append(f"C{a}+C{b}")
    verdict("5", not bad, f"{len(bad)} mismatches (corpus trees, cycles, paths, {unions} unions) {bad[:5]}")


def test_c06_tree_oracle(verdict):
    worst = 0.0
    for g in default_corpus(seed=0):
        order = _fixed_or_identity(g)
        for beta in DEFAULT_BETAS:
            sched = Schedule.single(beta)
            t, f = build_tree(g, 0, beta, order), build_forest(g, beta, order)
            worst = max(
                worst,
                verify_against_statevector(t, run_qaoa_plus(g, "empty", sched, NB, order)),
                verify_against_statevector(f, run_qaoa_plus(g, "w1", sched, SELF, order, Semantics.MIXTURE)),
                verify_against_statevector(f, run_qaoa_plus(g, "w1", sched, SELF, order, Semantics.COHERENT)),
            )
    verdict("6", worst < 1e-10, f"max amplitude deviation {worst:.2e}")


def test_c07_amplitude_ratio(verdict):
    worst, rows = 0.0, 0
    for beta in (pi / 2, 2 * pi / 3):
        table = eq15_table(G.cycle(8), beta)
        rows += len(table)
        for r in table:
            pred = 1 / (np.sqrt(8) * np.sin(beta / 2) * np.cos(beta / 2) ** r.d)
            worst = max(worst, abs(r.ratio - pred) / pred)
    verdict("7", worst < 1e-9, f"max relative deviation {worst:.2e} over {rows} (matching, tree) rows")


def test_c08a_bound_above_uniform(verdict):
    t0 = time.perf_counter()
    curve = compare_vs_uniform(range(3, 60), pi / 2, exact_max_n=0)
    bad = curve.violations()["lower_vs_uniform"]
    dt = time.perf_counter() - t0
    r7 = next(r for r in curve.rows if r.n == 7)
    verdict("8(a)", not bad and dt < 120,
            f"lower bound <= uniform for n in {bad[:1]}..{bad[-1:]} ({len(bad)} values); "
            f"n=7: {r7.lower_bound:.4f} vs {r7.uniform:.4f}")


def test_c08bc_exact_curve(verdict):
    t0 = time.perf_counter()
    curve = compare_vs_uniform(range(3, 17), pi / 2, exact_max_n=16)
    viol = curve.violations()
    dt = time.perf_counter() - t0
    ok = not viol["exact_vs_uniform"] and not viol["lower_vs_exact"] and dt < 120
    verdict("8(b,c)", ok, f"exact<=uniform at {viol['exact_vs_uniform']}, "
                          f"bound>=exact at {viol['lower_vs_exact']}, {dt:.1f}s")


@pytest.mark.parametrize("sizes", [[18], [9, 9]])
def test_c09_w1_beats_empty(verdict, sizes):
    t0 = time.perf_counter()
    g = G.two_regular(sizes)
    beta = 3 * pi / 4
    e_w1 = expected_matching_size(
        run_qaoa_plus(g, "w1", Schedule.single(beta), SELF, "fixed", Semantics.MIXTURE)).expectation
    e_0 = expected_matching_size(
        run_qaoa_plus(g, "empty", Schedule.single(beta), NB, "fixed")).expectation
    dt = time.perf_counter() - t0
    verdict(f"9 {g.describe()}", e_w1 > e_0 and dt < 180,
            f"E[X] w1 mixture {e_w1:.4f} vs empty {e_0:.4f} ({dt:.1f}s)")


def test_c10_convergence(verdict):
    details, ok = [], True
    c3 = maximal_convergence_profile(G.cycle(3), 3 * pi / 4)
    ok &= abs(c3.mass[0] - 1) < 1e-12
    for n in range(4, 9):
        prof = maximal_convergence_profile(G.cycle(n), 3 * pi / 4, max_rounds=2 * n)
        ok &= prof.non_decreasing and prof.p_star is not None and prof.p_star <= 2 * n
        details.append(f"C{n}:p*={prof.p_star}")
    verdict("10", bool(ok), f"C3 start mass {c3.mass[0]:.3f}; " + " ".join(details))


def test_c11_gamma_invariance(verdict):
    g = G.cycle(6)
    worst = 0.0
    for init, mode, sem in (("empty", NB, Semantics.COHERENT), ("w1", SELF, Semantics.MIXTURE),
                            ("w1", SELF, Semantics.COHERENT)):
        dists = [run_qaoa_plus(g, init, Schedule.single(1.1, gamma), mode, "fixed", sem).distribution.probs
                 for gamma in (0.0, 1.0, pi)]
        worst = max(worst, *(np.max(np.abs(d - dists[0])) for d in dists[1:]))
    verdict("11", worst < 1e-12, f"max distribution difference across gamma {worst:.1e}")


def _cli(out, *args):
    subprocess.run([sys.executable, "-m", "qaoa_matching", *args, "--out", str(out)],
                   check=False, capture_output=True)


def test_c12_determinism(verdict, tmp_path):
    runs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        _cli(out, "verify", "all", "--seed", "7")
        _cli(out, "curves", "fig4", "--n", "3:12")
        _cli(out, "curves", "fig5", "--max-vertices", "8", "--shots", "300", "--seed", "7")
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    same = runs[0] == runs[1] and len(runs[0]) >= 4
    verdict("12", same, f"{len(runs[0])} artifacts compared byte for byte: {sorted(runs[0])}")
