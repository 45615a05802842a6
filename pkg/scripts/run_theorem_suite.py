"""Run every verify suite on the default corpus and print one summary line per suite."""

import argparse
import sys
import time

from qaoa_matching.analysis import DEFAULT_BETAS, SUITES, default_corpus, theorem_suite


def run(seed: int) -> int:
    corpus = default_corpus(seed)
    failed = 0
    for suite in SUITES[:-1]:
        t0 = time.perf_counter()
        rep = theorem_suite(corpus, DEFAULT_BETAS, suite, seed)
        ok = sum(c.passed for c in rep.checks)
        failed += len(rep.checks) - ok
        print(f"{suite:13s} {ok:5d}/{len(rep.checks):<5d} {time.perf_counter() - t0:6.2f}s")
    return 1 if failed else 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    sys.exit(run(p.parse_args().seed))
