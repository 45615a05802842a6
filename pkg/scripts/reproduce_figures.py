"""Write every curve dataset into one directory (default ./out/figures)."""

import argparse
import sys

from qaoa_matching.cli import main

RUNS = [
    ["fig3"],
    ["fig4"],
    ["bracket"],
    ["thm4", "--graph", "cycle:18", "--beta", "3pi/4"],
    ["thm4", "--graph", "two_regular:9,9", "--beta", "3pi/4"],
    ["converge", "--graph", "cycle:8", "--beta", "3pi/4"],
    ["fig5", "--beta", "3pi/4", "--shots", "10000", "--seed", "0"],
]


def run(out: str) -> int:
    rc = 0
    for args in RUNS:
        # thm4 writes fixed file names, so each graph gets its own subdirectory
        sub = f"{out}/{args[0]}_{args[2].replace(':', '_').replace(',', '_')}" if args[0] == "thm4" else out
        rc |= main(["curves", *args, "--out", sub])
    return rc


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="out/figures")
    sys.exit(run(p.parse_args().out))
