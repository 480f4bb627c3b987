"""Certified entropy lower bounds of the stage maps h_n = g_n o f.

Each bound is log of an exact Collatz-Wielandt ratio for a covering matrix,
so it is a true lower bound for the topological entropy of h_n; the growth
across stages is the finite shadow of infinite entropy in the limit.

    python3 demos/entropy_growth.py [stages]     (4 stages take about a minute)
"""
import math
import sys

from puremix.certify import entropy_markov_lower_bound
from puremix.construction import build_pure_mixing, stage_maps
from puremix.extension import unit_interval
from puremix.numeric import entropy_separated_estimate


def main(N=3):
    res = build_pure_mixing(unit_interval(), N=N, check=False)
    print(f"{'stage':>5} {'pieces':>8} {'log rho >=':>11} {'cells':>7}  separated-set estimate")
    prev = None
    for n, h in enumerate(stage_maps(res), start=1):
        b = entropy_markov_lower_bound(h)
        est = entropy_separated_estimate(h, 0.01, 3, bits=12).value
        step = "" if prev is None else f"  (+{b.value - prev:.3f})"
        print(f"{n:5d} {h.n_pieces:8d} {b.value:11.4f} {b.cells:7d}  {est:.3f}{step}")
        prev = b.value
    print(f"\nreference: log(3)/2 = {math.log(3) / 2:.4f}")
    # the separated-set numbers saturate at log(grid size) / n and are only a heuristic


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
