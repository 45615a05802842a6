"""Expectations, analytic bound curves and the theorem check suite."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from math import pi
from typing import Iterable, Sequence

import numpy as np

from . import graph as G
from .ansatz import ControlMode, RunOutput, Schedule, Semantics, apply_mixer_sweep, run_qaoa_plus
from .matchings import (
    closed_form_counts,
    convolve_counts,
    cycle_count,
    enumerate_matchings,
    is_maximal,
    matching_counts,
)
from .statevector import SUPPORT_THRESHOLD, StateVector, support
from .tree import build_forest, build_tree, eq15_table, leaf_census, verify_against_statevector

ORACLE_TOL = 1e-10
UNITARITY_TOL = 1e-10
EMPTY_PROB_TOL = 1e-18
EQ15_TOL = 1e-9


# --------------------------------------------------------------------- expectations

@dataclass
class ExpectationReport:
    expectation: float
    size_probs: list[float]
    raw_expectation: float | None = None
    config: dict = field(default_factory=dict)


def expected_matching_size(out: RunOutput) -> ExpectationReport:
    probs = out.distribution.size_distribution()
    ks = np.arange(probs.size)
    raw = None
    if out.raw_state is not None:
        raw = float(out.raw_norm2 * (probs @ ks))
    return ExpectationReport(
        float(probs @ ks), [float(p) for p in probs], raw,
        {"init": out.init, "semantics": out.semantics.value, "mode": out.mode.value},
    )


def _expectation(out: RunOutput) -> float:
    return expected_matching_size(out).expectation


def uniform_expectation(g: G.Graph) -> float:
    mc = matching_counts(g)
    return mc.phi_plus / mc.phi


def uniform_cycle_expectation(n: int) -> float:
    mc = closed_form_counts("cycle", n)
    return mc.phi_plus / mc.phi


def _sc(beta: float) -> tuple[float, float]:
    return np.sin(beta / 2) ** 2, np.cos(beta / 2) ** 2


def prob_upper_bound(n: int, k: int, beta: float) -> float:
    s, c = _sc(beta)
    return s**k * c ** (n - 2 * k) * cycle_count(n, k)


def prob_lower_bound(n: int, k: int, beta: float) -> float:
    s, _ = _sc(beta)
    return prob_upper_bound(n, k, beta) * (1 - s * k / n)


def qaoa_cycle_lower_bound(n: int, beta: float) -> float:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return float(sum(k * prob_lower_bound(n, k, beta) for k in range(n // 2 + 1)))


def half_pi_lower_bound(n: int) -> float:
    """The beta = pi/2 specialisation: sum_k k Phi_k (1/2)^(n-k) (1 - k/(2n))."""
    return float(sum(k * cycle_count(n, k) * 0.5 ** (n - k) * (1 - k / (2 * n))
                     for k in range(n // 2 + 1)))


# --------------------------------------------------------------------- curves

@dataclass
class CurveRow:
    n: int
    lower_bound: float
    uniform: float
    exact: float | None = None


@dataclass
class BoundCurve:
    beta: float
    rows: list[CurveRow]

    def violations(self, n_min: int = 7) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {"lower_vs_uniform": [], "exact_vs_uniform": [], "lower_vs_exact": []}
        for r in self.rows:
            if r.n >= n_min and not r.lower_bound > r.uniform:
                out["lower_vs_uniform"].append(r.n)
            if r.exact is not None:
                if r.n >= n_min and not r.exact > r.uniform:
                    out["exact_vs_uniform"].append(r.n)
                if not r.lower_bound < r.exact:
                    out["lower_vs_exact"].append(r.n)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "lower_bound", "uniform", "exact_or_blank"])
        for r in self.rows:
            w.writerow([r.n, repr(r.lower_bound), repr(r.uniform),
                        "" if r.exact is None else repr(r.exact)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, beta: float) -> "BoundCurve":
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            ex = rec["exact_or_blank"]
            rows.append(CurveRow(int(rec["n"]), float(rec["lower_bound"]), float(rec["uniform"]),
                                 float(ex) if ex else None))
        return cls(beta, rows)


def exact_cycle_expectation(n: int, beta: float) -> float:
    out = run_qaoa_plus(G.cycle(n), "empty", Schedule.single(beta))
    return _expectation(out)


def compare_vs_uniform(ns: Iterable[int], beta: float, exact_max_n: int = 16) -> BoundCurve:
    rows = []
    for n in ns:
        rows.append(CurveRow(
            n, qaoa_cycle_lower_bound(n, beta), uniform_cycle_expectation(n),
            exact_cycle_expectation(n, beta) if n <= exact_max_n else None,
        ))
    return BoundCurve(beta, rows)


# --------------------------------------------------------------------- initial states

def _theorem_ranges(beta: float) -> dict:
    return {
        "w1_vs_empty_range": bool(pi / 2 < beta <= pi),
        "qaoa_vs_uniform_range": bool(pi / 2 <= beta < pi),
    }


def eq17_table(g: G.Graph, beta: float, w1: RunOutput | None = None,
               empty: RunOutput | None = None) -> list[dict]:
    """Per matching: P_W1(M) / P_empty(M) against the claimed (2^(k+1) - 2) / |E| factor."""
    w1 = w1 or run_qaoa_plus(g, "w1", Schedule.single(beta), ControlMode.INCLUDE_SELF,
                             "fixed", Semantics.MIXTURE)
    empty = empty or run_qaoa_plus(g, "empty", Schedule.single(beta))
    rows = []
    for z in enumerate_matchings(g):
        k = z.bit_count()
        if k == 0:
            continue
        pw, p0 = w1.distribution[z], empty.distribution[z]
        claimed = (2 ** (k + 1) - 2) / g.m
        ratio = pw / p0 if p0 > 0 else float("inf")
        rows.append({"matching": z, "size": k, "p_w1": pw, "p_empty": p0,
                     "ratio": ratio, "claimed_factor": claimed, "holds": bool(ratio >= claimed)})
    return rows


def compare_initial_states(g: G.Graph, beta: float) -> dict:
    if not g.is_two_regular():
        raise ValueError("compare_initial_states needs a 2-regular graph")
    sched = Schedule.single(beta)

    def measure(h: G.Graph) -> dict:
        e0 = run_qaoa_plus(h, "empty", sched, ControlMode.NEIGHBORHOOD, "fixed")
        wm = run_qaoa_plus(h, "w1", sched, ControlMode.INCLUDE_SELF, "fixed", Semantics.MIXTURE)
        wc = run_qaoa_plus(h, "w1", sched, ControlMode.INCLUDE_SELF, "fixed", Semantics.COHERENT)
        rep = {
            "graph": h.describe(), "m": h.m,
            "E_empty": _expectation(e0),
            "E_w1_mixture": _expectation(wm),
            "E_w1_coherent": _expectation(wc),
            "w1_coherent_raw_norm2": wc.raw_norm2,
            "E_uniform": uniform_expectation(h),
        }
        rep["w1_beats_empty"] = rep["E_w1_mixture"] > rep["E_empty"]
        rep["w1_coherent_beats_empty"] = rep["E_w1_coherent"] > rep["E_empty"]
        rep["_runs"] = (wm, e0)
        return rep

    total = measure(g)
    wm, e0 = total.pop("_runs")
    parts = []
    for sub, _ in G.components(g):
        rep = measure(sub)
        rep.pop("_runs")
        parts.append(rep)
    eq17 = eq17_table(g, beta, wm, e0)
    return {
        "beta": beta,
        **_theorem_ranges(beta),
        "edges_above_16": g.m > 16,
        "total": total,
        "components": parts,
        "eq17_rows": len(eq17),
        "eq17_holds": sum(r["holds"] for r in eq17),
        "eq17": eq17,
    }


# --------------------------------------------------------------------- convergence

@dataclass
class ConvergenceProfile:
    mass: list[float]
    epsilon: float
    p_star: int | None

    @property
    def non_decreasing(self) -> bool:
        return all(b >= a - 1e-12 for a, b in zip(self.mass, self.mass[1:]))


def maximal_convergence_profile(g: G.Graph, beta: float, max_rounds: int | None = None,
                                epsilon: float = 1e-3, gamma: float = 0.0) -> ConvergenceProfile:
    """Probability mass on maximal matchings after each round (index 0 = W1 input)."""
    max_rounds = max_rounds or 2 * g.m
    maximal = [z for z in enumerate_matchings(g) if is_maximal(g, z)]
    out = run_qaoa_plus(g, "w1", Schedule.constant(beta, max_rounds, gamma),
                        ControlMode.INCLUDE_SELF, "fixed", Semantics.MIXTURE, record_rounds=True)
    mass = [float(min(1.0, d.probs[maximal].sum())) for d in out.round_distributions]
    p_star = next((p for p, x in enumerate(mass) if x >= 1 - epsilon), None)
    return ConvergenceProfile(mass, epsilon, p_star)


# --------------------------------------------------------------------- theorem suite

@dataclass
class CheckResult:
    check: str
    graph: str
    params: dict
    measured: object
    threshold: object
    passed: bool

    def __post_init__(self):
        self.passed = bool(self.passed)


@dataclass
class Report:
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, *args, **kw) -> CheckResult:
        r = CheckResult(*args, **kw)
        self.checks.append(r)
        return r

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> dict[str, tuple[int, int]]:
        out: dict[str, list[int]] = {}
        for c in self.checks:
            t = out.setdefault(c.check, [0, 0])
            t[0] += c.passed
            t[1] += 1
        return {k: (v[0], v[1]) for k, v in out.items()}

    def to_json(self, **extra) -> str:
        return json.dumps({**extra, "passed": self.passed,
                           "checks": [asdict(c) for c in self.checks]},
                          indent=1, default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


DEFAULT_BETAS = (0.3, pi / 2, 2.5)


def default_corpus(seed: int = 0, n_random: int = 20) -> list[G.Graph]:
    rng = np.random.default_rng(seed)
    graphs = [G.cycle(n) for n in range(3, 11)]
    graphs += [G.path(n) for n in range(2, 11)]
    graphs.append(G.two_regular([3, 4]))
    graphs += [G.random_graph(rng) for _ in range(n_random)]
    return graphs


def random_trial_graphs(seed: int = 0, count: int = 20) -> list[G.Graph]:
    rng = np.random.default_rng(seed)
    return [G.random_graph(rng) for _ in range(count)]


def orderings_for(g: G.Graph, rng: np.random.Generator, n_random: int = 3) -> list[G.EdgeOrdering]:
    try:
        base = G.make_ordering(g, "fixed")
    except G.OrderingUndefined:
        base = G.make_ordering(g, list(range(g.m)))
    return [base] + [G.random_ordering(g, rng) for _ in range(n_random)]


def _random_state(rng: np.random.Generator, m: int, allowed: np.ndarray | None = None) -> StateVector:
    amps = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    if allowed is not None:
        amps = np.where(allowed, amps, 0)
    return StateVector(m, amps / np.linalg.norm(amps))


def _matching_set(g: G.Graph) -> set[int]:
    return set(enumerate_matchings(g))


def check_unitarity(report: Report, graphs: Sequence[G.Graph], betas, rng, states: int = 100) -> None:
    per = max(1, states // len(graphs)) if graphs else 0
    for g in graphs:
        adj = G.edge_adjacency(g)
        order = G.make_ordering(g, list(range(g.m)))
        for beta in betas:
            drift = 0.0
            for _ in range(per):
                sv = _random_state(rng, g.m)
                _, n2 = apply_mixer_sweep(sv, beta, order, adj, ControlMode.NEIGHBORHOOD)
                drift = max(drift, abs(n2 - 1.0))
            report.add("unitarity", g.describe(), {"beta": beta, "states": per}, drift,
                       UNITARITY_TOL, drift < UNITARITY_TOL)


def check_lemma1(report: Report, graphs: Sequence[G.Graph], betas, rng, states: int = 100) -> None:
    from .matchings import matching_mask
    from .statevector import prepare_initial

    per = max(1, states // len(graphs)) if graphs else 0
    for g in graphs:
        adj = G.edge_adjacency(g)
        mask = matching_mask(g)
        order = G.make_ordering(g, list(range(g.m)))
        inputs = [prepare_initial("empty", g.m), prepare_initial("w1", g.m)]
        inputs += [_random_state(rng, g.m, mask) for _ in range(per)]
        for beta in betas:
            for mode in ControlMode:
                leak = 0.0
                for sv in inputs:
                    out, _ = apply_mixer_sweep(sv, beta, order, adj, mode)
                    leak = max(leak, float(np.max(np.abs(out.amps[~mask]), initial=0.0)))
                report.add("lemma1", g.describe(), {"beta": beta, "mode": mode.value,
                                                   "inputs": len(inputs)},
                           leak, SUPPORT_THRESHOLD, leak <= SUPPORT_THRESHOLD)


def check_thm1(report: Report, graphs, betas, rng) -> None:
    for g in graphs:
        want = _matching_set(g)
        for order in orderings_for(g, rng):
            for beta in betas:
                out = run_qaoa_plus(g, "empty", Schedule.single(beta), ControlMode.NEIGHBORHOOD, order)
                got = support(out.state)
                mism = len(got ^ want)
                report.add("thm1", g.describe(), {"beta": beta, "ordering": list(order.order)},
                           {"support": len(got), "matchings": len(want), "mismatches": mism},
                           0, mism == 0)


def check_thm2(report: Report, graphs, betas, rng) -> None:
    for g in graphs:
        want = _matching_set(g) - {0}
        for order in orderings_for(g, rng):
            for beta in betas:
                for sem in Semantics:
                    out = run_qaoa_plus(g, "w1", Schedule.single(beta), ControlMode.INCLUDE_SELF,
                                        order, sem)
                    got = {int(z) for z in np.flatnonzero(np.sqrt(out.distribution.probs) > SUPPORT_THRESHOLD)}
                    mism = len(got ^ want)
                    p_empty = out.distribution[0]
                    report.add("thm2", g.describe(),
                               {"beta": beta, "ordering": list(order.order), "semantics": sem.value},
                               {"support": len(got), "mismatches": mism, "p_empty": p_empty},
                               {"mismatches": 0, "p_empty": EMPTY_PROB_TOL},
                               mism == 0 and p_empty < EMPTY_PROB_TOL)


def check_observations(report: Report, graphs, betas) -> None:
    for g in graphs:
        mc = matching_counts(g)
        want = _matching_set(g)
        for beta in betas:
            t = build_tree(g, 0, beta, _fixed_or_identity(g))
            cen = leaf_census(t)
            ok1 = cen["leaves"] == mc.phi and cen["distinct"] == mc.phi and set(t.leaves) == want
            report.add("obs1", g.describe(), {"beta": beta},
                       {"leaves": cen["leaves"], "distinct": cen["distinct"]}, mc.phi, ok1)
            f = build_forest(g, beta, _fixed_or_identity(g))
            fc = leaf_census(f)
            mult_ok = all(c == z.bit_count() for z, c in fc["multiplicity"].items())
            per_tree_distinct = all(len(set(tr.leaves)) == len(tr.leaves) for tr in f.trees)
            ok2 = fc["leaves"] == mc.phi_plus and mult_ok and per_tree_distinct
            report.add("obs2", g.describe(), {"beta": beta},
                       {"leaves": fc["leaves"], "multiplicity_eq_size": mult_ok,
                        "per_tree_distinct": per_tree_distinct}, mc.phi_plus, ok2)


def _fixed_or_identity(g: G.Graph) -> G.EdgeOrdering:
    try:
        return G.make_ordering(g, "fixed")
    except G.OrderingUndefined:
        return G.make_ordering(g, list(range(g.m)))


def check_oracle(report: Report, graphs, betas) -> None:
    for g in graphs:
        order = _fixed_or_identity(g)
        for beta in betas:
            sched = Schedule.single(beta)
            t = build_tree(g, 0, beta, order)
            d_empty = verify_against_statevector(t, run_qaoa_plus(g, "empty", sched, "nbhd", order))
            f = build_forest(g, beta, order)
            mix = run_qaoa_plus(g, "w1", sched, "self", order, "mixture")
            coh = run_qaoa_plus(g, "w1", sched, "self", order, "coherent")
            d_mix = verify_against_statevector(f, mix)
            d_coh = verify_against_statevector(f, coh)
            dev = max(d_empty, d_mix, d_coh)
            report.add("oracle", g.describe(), {"beta": beta},
                       {"empty": d_empty, "w1_mixture": d_mix, "w1_coherent": d_coh},
                       ORACLE_TOL, dev < ORACLE_TOL)


def check_closed_forms(report: Report, n_max: int = 14, union_max: int = 16) -> None:
    for n in range(3, n_max + 1):
        bf = matching_counts(G.cycle(n)).phi_k
        cf = closed_form_counts("cycle", n).phi_k
        report.add("lemma2_cycle", f"C{n}", {}, list(cf), list(bf), cf == bf)
    for n in range(2, n_max + 1):
        bf = matching_counts(G.path(n)).phi_k
        cf = closed_form_counts("path", n).phi_k
        report.add("lemma3_path", f"P{n}", {}, list(cf), list(bf), cf == bf)
    for a in range(3, union_max - 2):
        for b in range(a, union_max - a + 1):
            g = G.two_regular([a, b])
            bf = matching_counts(g).phi_k
            cf = convolve_counts([closed_form_counts("cycle", a), closed_form_counts("cycle", b)]).phi_k
            report.add("lemma4_union", g.describe(), {}, list(cf), list(bf), cf == bf)


def check_eq15(report: Report, n: int = 8, betas=(pi / 2, 2 * pi / 3)) -> None:
    for beta in betas:
        rows = eq15_table(G.cycle(n), beta)
        dev = max(r.rel_dev for r in rows)
        outside = sum(not r.d_in_claimed_range for r in rows)
        report.add("eq15", f"C{n}", {"beta": beta, "rows": len(rows)},
                   {"max_rel_dev": dev, "d_outside_0_to_k-1": outside}, EQ15_TOL, dev < EQ15_TOL)


SUITES = ("thm1", "thm2", "lemma1", "obs", "eq15", "unitarity", "oracle", "closed_forms", "all")


def theorem_suite(corpus: Sequence[G.Graph], betas: Sequence[float] = DEFAULT_BETAS,
                  suite: str = "all", seed: int = 0) -> Report:
    """Run the support, count, feasibility and oracle checks over ``corpus``.

    Failures become report entries rather than exceptions.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    report = Report()
    if not corpus:
        return report
    rng = np.random.default_rng(seed)
    want = (lambda name: suite in (name, "all"))
    small = [g for g in corpus if g.m <= 10]
    if want("unitarity"):
        check_unitarity(report, small, betas, rng)
    if want("lemma1"):
        check_lemma1(report, small, betas, rng)
    if want("thm1"):
        check_thm1(report, corpus, betas, rng)
    if want("thm2"):
        check_thm2(report, corpus, betas, rng)
    if want("obs"):
        check_observations(report, corpus, betas)
    if want("oracle"):
        check_oracle(report, corpus, betas)
    if suite == "closed_forms" or suite == "all":
        check_closed_forms(report)
    if want("eq15"):
        cycles = [g for g in corpus if g.is_two_regular() and len(G.components(g)) == 1]
        if suite == "eq15" and cycles:
            for g in cycles:
                check_eq15(report, g.m, betas)
        else:
            check_eq15(report)
    return report
