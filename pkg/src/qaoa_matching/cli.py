"""Command-line entry point: ``qaoa-matching simulate | verify | curves``.

Every artifact is a pure function of the command line (and root seed), so
reruns produce byte-identical files.  Output goes to ``--out`` or, failing
that, ``$QAOA_MATCHING_OUT`` (default ``./out``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from itertools import combinations_with_replacement
from pathlib import Path

import numpy as np

from . import analysis as A
from . import graph as G
from .ansatz import ControlMode, Schedule, Semantics, run_qaoa_plus
from .config import ExperimentConfig, default_out_dir, load_graph, parse_angle, resolve_ordering
from .statevector import CapExceeded, QUBIT_CAP, sample


class CliError(Exception):
    pass


def _dump_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=1, sort_keys=True, default=A._json_default) + "\n")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _rows_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if x is None else (repr(x) if isinstance(x, float) else x) for x in r])
    return buf.getvalue()


def _out_dir(args) -> Path:
    return Path(args.out) if args.out else default_out_dir()


def _n_range(text: str) -> range:
    lo, _, hi = text.partition(":")
    return range(int(lo), int(hi or lo) + 1)


# --------------------------------------------------------------------- simulate

def _config_from_args(args) -> ExperimentConfig:
    data = json.loads(Path(args.config).read_text()) if args.config else {}
    if args.graph:
        data["graph"] = args.graph
    if "graph" not in data:
        raise CliError("no graph given (use --graph or a config file)")
    for key in ("init", "control", "semantics", "seed", "threshold", "shots"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.ordering is not None:
        data["ordering"] = args.ordering
    if args.schedule:
        data["schedule"] = [[parse_angle(x) for x in pair.split(",")] for pair in args.schedule.split(";")]
    elif args.beta is not None or "schedule" not in data:
        beta = parse_angle(args.beta) if args.beta is not None else math.pi / 2
        gamma = parse_angle(args.gamma) if args.gamma is not None else 0.0
        data["schedule"] = [[gamma, beta]] * args.p
    if args.out:
        data["out"] = args.out
    return ExperimentConfig.from_dict(data)


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    rng = np.random.default_rng(cfg.seed)
    g = load_graph(cfg.graph)
    if g.m > QUBIT_CAP:
        raise CapExceeded(f"m={g.m} exceeds qubit cap {QUBIT_CAP}")
    order = resolve_ordering(g, cfg.ordering, rng)
    out = run_qaoa_plus(g, cfg.init, Schedule.of(cfg.schedule), ControlMode.parse(cfg.control),
                        order, Semantics.parse(cfg.semantics))
    rep = A.expected_matching_size(out)
    dest = Path(cfg.out) if cfg.out else default_out_dir()
    _write(dest / "distribution.csv", out.distribution.to_csv(threshold=cfg.threshold**2))
    _dump_json(dest / "expectation.json", {
        "graph": g.describe(), "m": g.m, "expectation": rep.expectation,
        "raw_expectation": rep.raw_expectation, "size_probs": rep.size_probs,
        "raw_norm2": out.raw_norm2, "uniform": A.uniform_expectation(g) if g.m <= 24 else None,
        "config": {**cfg.to_dict(), "ordering": list(order.order)},
    })
    _write(dest / "norm_trace.csv", _rows_csv(["round", "norm2"], enumerate(out.norm_trace, 1)))
    if out.state is not None and args.dump_state:
        _write(dest / "statevector.csv", out.state.to_csv(threshold=cfg.threshold))
    if cfg.shots:
        counts = sample(out.distribution, cfg.shots, cfg.seed)
        _dump_json(dest / "samples.json", {"shots": cfg.shots, "seed": cfg.seed,
                                           "counts": {str(k): v for k, v in sorted(counts.items())}})
    print(f"{g.describe()}: E[X] = {rep.expectation:.6f}  raw norm^2 = {out.raw_norm2:.6f}  -> {dest}")
    return 0


# --------------------------------------------------------------------- verify

def cmd_verify(args) -> int:
    if args.graph:
        corpus = [load_graph(x) for x in args.graph]
    elif args.corpus == "default":
        corpus = A.default_corpus(args.seed)
    else:
        raise CliError(f"unknown corpus {args.corpus!r}")
    betas = [parse_angle(b) for b in args.beta] if args.beta else list(A.DEFAULT_BETAS)
    for g in corpus:
        if g.m > QUBIT_CAP:
            raise CapExceeded(f"{g.describe()}: m={g.m} exceeds qubit cap {QUBIT_CAP}")
    report = A.theorem_suite(corpus, betas, args.suite, args.seed)
    dest = _out_dir(args) / f"report_{args.suite}.json"
    _write(dest, report.to_json(suite=args.suite, seed=args.seed, betas=betas) + "\n")
    for name, (ok, total) in report.summary().items():
        print(f"{'PASS' if ok == total else 'FAIL'}  {name:14s} {ok}/{total}")
    if args.suite == "obs":
        for c in report.checks:
            print(f"  {c.check} {c.graph} beta={c.params['beta']:.4f} leaves={c.measured['leaves']} "
                  f"expected={c.threshold}")
    if args.suite == "eq15":
        for c in report.checks:
            print(f"  eq15 {c.graph} beta={c.params['beta']:.4f} max rel dev={c.measured['max_rel_dev']:.3e}")
    print(f"report -> {dest}")
    return 0 if report.passed else 1


# --------------------------------------------------------------------- curves

def _two_regular_family(max_vertices: int) -> list[G.Graph]:
    graphs = []
    for r in range(1, max_vertices // 3 + 1):
        for sizes in combinations_with_replacement(range(3, max_vertices + 1), r):
            if sum(sizes) <= max_vertices:
                graphs.append(G.two_regular(list(sizes)))
    return graphs


def cmd_curves(args) -> int:
    dest = _out_dir(args)
    beta = parse_angle(args.beta)
    kind = args.kind
    if kind in ("fig3", "fig4"):
        ns = _n_range(args.n or ("3:59" if kind == "fig3" else "3:16"))
        exact_max = args.exact_max if args.exact_max is not None else (0 if kind == "fig3" else 16)
        if kind == "fig4" and max(ns) > QUBIT_CAP and exact_max >= max(ns):
            raise CapExceeded(f"exact column needs n <= {QUBIT_CAP}")
        curve = A.compare_vs_uniform(ns, beta, min(exact_max, QUBIT_CAP))
        _write(dest / f"{kind}.csv", curve.to_csv())
        viol = curve.violations()
        _dump_json(dest / f"{kind}_summary.json", {"beta": beta, "n": [min(ns), max(ns)], "violations": viol})
        print(f"{kind}: {len(curve.rows)} rows; n>6 with lower<=uniform: {viol['lower_vs_uniform']}; "
              f"exact<=uniform: {viol['exact_vs_uniform']}; lower>=exact: {viol['lower_vs_exact']}")
    elif kind == "bracket":
        rows = []
        for n in _n_range(args.n or "7:16"):
            P = run_qaoa_plus(G.cycle(n), "empty", Schedule.single(beta)).distribution.size_distribution()
            for k in range(1, n // 2 + 1):
                lo, hi = A.prob_lower_bound(n, k, beta), A.prob_upper_bound(n, k, beta)
                rows.append((n, k, lo, float(P[k]), hi, int(lo < P[k]), int(P[k] < hi)))
        _write(dest / "bracket.csv", _rows_csv(
            ["n", "k", "lower", "exact", "upper", "above_lower", "below_upper"], rows))
        print(f"bracket: {len(rows)} rows, upper side violated in {sum(1 - r[6] for r in rows)}")
    elif kind == "thm4":
        g = load_graph(args.graph or "cycle:18")
        rep = A.compare_initial_states(g, beta)
        _dump_json(dest / "thm4.json", rep)
        parts = [("total", rep["total"])] + [(f"component{i}", c) for i, c in enumerate(rep["components"])]
        _write(dest / "thm4.csv", _rows_csv(
            ["scope", "graph", "E_empty", "E_w1_mixture", "E_w1_coherent", "E_uniform", "w1_beats_empty"],
            [(s, c["graph"], c["E_empty"], c["E_w1_mixture"], c["E_w1_coherent"], c["E_uniform"],
              int(c["w1_beats_empty"])) for s, c in parts]))
        t = rep["total"]
        print(f"thm4 {t['graph']}: E_w1(mixture)={t['E_w1_mixture']:.6f} "
              f"E_w1(coherent)={t['E_w1_coherent']:.6f} E_empty={t['E_empty']:.6f}")
    elif kind == "converge":
        g = load_graph(args.graph or "cycle:6")
        prof = A.maximal_convergence_profile(g, beta, args.rounds, args.epsilon)
        _write(dest / "converge.csv", _rows_csv(["p", "maximal_mass"], enumerate(prof.mass)))
        _dump_json(dest / "converge.json", {"graph": g.describe(), "beta": beta, "epsilon": prof.epsilon,
                                            "p_star": prof.p_star, "non_decreasing": prof.non_decreasing,
                                            "budget_2E": 2 * g.m})
        print(f"converge {g.describe()}: p* = {prof.p_star}, non-decreasing = {prof.non_decreasing}")
    elif kind == "fig5":
        rows = []
        for g in _two_regular_family(args.max_vertices):
            rep = A.compare_initial_states(g, beta)["total"]
            row = [g.describe(), rep["E_empty"], rep["E_w1_mixture"], rep["E_w1_coherent"], rep["E_uniform"]]
            if args.shots:
                for init, mode, sem in (("empty", "nbhd", "coherent"), ("w1", "self", "mixture")):
                    out = run_qaoa_plus(g, init, Schedule.single(beta), mode, "fixed", sem)
                    counts = sample(out.distribution, args.shots, args.seed)
                    row.append(sum(z.bit_count() * c for z, c in counts.items()) / args.shots)
            rows.append(row)
        header = ["graph", "E_empty", "E_w1_mixture", "E_w1_coherent", "E_uniform"]
        if args.shots:
            header += ["E_empty_sampled", "E_w1_sampled"]
        _write(dest / "fig5.csv", _rows_csv(header, rows))
        print(f"fig5: {len(rows)} graphs")
    else:
        raise CliError(f"unknown curve kind {kind!r}")
    return 0


# --------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qaoa-matching", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one QAOA+ configuration")
    s.add_argument("--config", help="JSON run configuration")
    s.add_argument("--graph", help="cycle:N | path:N | two_regular:a,b,... | graph JSON file")
    s.add_argument("--init", choices=["empty", "w1"])
    s.add_argument("--beta")
    s.add_argument("--gamma")
    s.add_argument("--p", type=int, default=1, help="rounds when --beta/--gamma are given")
    s.add_argument("--schedule", help="'gamma,beta;gamma,beta;...'")
    s.add_argument("--control", choices=["nbhd", "self"])
    s.add_argument("--ordering", help="fixed | identity | random | comma-separated permutation")
    s.add_argument("--semantics", choices=["coherent", "mixture"])
    s.add_argument("--seed", type=int)
    s.add_argument("--threshold", type=float)
    s.add_argument("--shots", type=int)
    s.add_argument("--dump-state", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run theorem checks against brute-force oracles")
    v.add_argument("suite", choices=list(A.SUITES))
    v.add_argument("--corpus", default="default")
    v.add_argument("--graph", action="append", help="check only these graphs (repeatable)")
    v.add_argument("--beta", action="append", help="override the beta set (repeatable)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("curves", help="emit figure / theorem datasets as CSV")
    c.add_argument("kind", choices=["fig3", "fig4", "bracket", "thm4", "converge", "fig5"])
    c.add_argument("--beta", default="pi/2")
    c.add_argument("--n", help="range lo:hi (inclusive)")
    c.add_argument("--exact-max", type=int)
    c.add_argument("--graph")
    c.add_argument("--rounds", type=int)
    c.add_argument("--epsilon", type=float, default=1e-3)
    c.add_argument("--max-vertices", type=int, default=10)
    c.add_argument("--shots", type=int, default=0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_curves)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"error: CapExceeded: {exc}", file=sys.stderr)
        return 2
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
