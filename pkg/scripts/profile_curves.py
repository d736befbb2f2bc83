"""Profile-bound curves for the fixed-distance graph, one CSV per eps.

With no --eps, uses the eps solving H(eps) = 1/2 (2^{1.5n} edges) plus the
four values of the 1/(1-eps) comparison table.
"""

import argparse
from pathlib import Path

from cominfo.fixed_distance import TABLE_EPS, emit_curves, entropy_inverse, parse_grid, seam


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, nargs="*")
    ap.add_argument("--grid", default="0.005:0.995:0.005")
    ap.add_argument("--outdir", default="curves")
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    eps_values = args.eps or [entropy_inverse(0.5), *TABLE_EPS]
    grid = parse_grid(args.grid)
    for eps in eps_values:
        path, table = emit_curves(eps, grid, out / f"profile_eps{eps:.4f}.csv")
        print(f"eps={eps:.6f}  tight below tau={seam(eps):.4f}  -> {path}")
    print(f"table -> {table}")


if __name__ == "__main__":
    main()
