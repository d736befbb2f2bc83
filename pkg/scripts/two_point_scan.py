"""Bracket delta(D) for the binary symmetric coupling over a grid of flip rates.

Writes eps, lower, upper, 2*eps and the exact value 1 - |1 - 2 eps| as CSV.
"""

import argparse
import csv
import sys

import numpy as np

from cominfo.fixed_distance import bsc_distribution
from cominfo.hypercontractivity import OptimizerConfig, delta_estimate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="0:0.5:0.05", help="A:B:STEP over eps")
    ap.add_argument("--bits", type=int, default=1, help="materialize D_{n,eps} with this many bits")
    ap.add_argument("--tol", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    a, b, step = map(float, args.grid.split(":"))
    eps_values = np.round(np.arange(a, b + step / 2, step), 10)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["eps", "lower", "upper", "two_eps", "exact"])
    for eps in eps_values:
        est = delta_estimate(bsc_distribution(args.bits, eps), args.tol, OptimizerConfig(seed=args.seed))
        w.writerow([eps, f"{est.lower:.6f}", f"{est.upper:.6f}", 2 * eps, 1 - abs(1 - 2 * eps)])
        fh.flush()
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
