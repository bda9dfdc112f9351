#!/usr/bin/env python3
"""Divergence certificate for the sparse-interval counterexample: the
analytic lower bound of s * perimeter grows without bound as more interval
pairs are added, even though the set has finite Gaussian perimeter scale.

Usage: python3 scripts/run_divergence_demo.py [--s 0.5] [--max-pairs 10000]
"""

import argparse
import sys

from gfp.asymptotics import divergent_example


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--max-pairs", type=int, default=10 ** 4)
    args = ap.parse_args(argv)

    print("pairs  total_length  lower_bound")
    pairs = 10
    while pairs <= args.max_pairs:
        ex = divergent_example(pairs, args.s)
        print(f"{ex.pairs:6d}  {ex.total_length:.9f}  {ex.lower_bound:.6e}")
        pairs *= 10
    return 0


if __name__ == "__main__":
    sys.exit(main())
