#!/usr/bin/env python3
"""Sup distance between the normalized exact law and its limit along each regime recipe.

Prints one CSV block per recipe, extending the n-range past the one used in
the test suite so the trend (or its absence) is visible.
"""

import argparse
import sys
import time

import numpy as np

from tcue.cli import CONVERGE_COLUMNS, converge_rows, fmt

RECIPES = {
    "c1": ([10**3, 10**4, 10**5, 10**6], np.linspace(-4, 8, 200)),
    "c2": ([10**3, 10**4, 10**5], np.linspace(-4, 8, 200)),
    "c3": ([10**3, 10**4, 10**5, 10**6], np.linspace(-4, 8, 200)),
    "c4": ([10**2, 10**3, 10**4, 10**5], np.linspace(-10, 0, 200)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--regimes", default="c1,c2,c3,c4")
    ap.add_argument("--k", type=int, default=1, help="truncation depth for c4")
    ap.add_argument("--max-n", type=float, default=1e6)
    args = ap.parse_args()

    for regime in args.regimes.split(","):
        n_list, grid = RECIPES[regime]
        n_list = [n for n in n_list if n <= args.max_n]
        t0 = time.perf_counter()
        rows = converge_rows(regime, n_list, grid, args.k)
        print(f"# {regime} ({time.perf_counter() - t0:.1f}s)")
        print(",".join(CONVERGE_COLUMNS))
        for n, p, k, thm, d in rows:
            print(f"{n},{p},{k},{thm},{fmt(d)}")
        print()
        sys.stdout.flush()


if __name__ == "__main__":
    main()
