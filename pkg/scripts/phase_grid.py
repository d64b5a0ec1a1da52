#!/usr/bin/env python3
"""Export the (beta, alpha) detectability phase diagram as a CSV grid.

Each row is (beta, alpha, label) where k ~ n^beta and the query budget is
Q ~ n^alpha.  Feed the output to any plotting tool to render the region map.

Usage:
    python3 scripts/phase_grid.py --resolution 200 --out phase_grid.csv
"""

import argparse
import csv
import sys

import numpy as np

from densequery.bounds import PhasePoint, classify_phase


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--resolution", type=int, default=200,
                    help="grid points per axis")
    ap.add_argument("--out", default="phase_grid.csv")
    args = ap.parse_args()

    r = args.resolution
    betas = np.linspace(0, 1, r + 2)[1:-1]
    alphas = np.linspace(0, 2, r + 2)[1:-1]
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["beta", "alpha", "label"])
        for beta in betas:
            for alpha in alphas:
                label = classify_phase(PhasePoint(alpha=float(alpha),
                                                  beta=float(beta)))
                writer.writerow([f"{beta:.6f}", f"{alpha:.6f}", label])
    print(f"wrote {r * r} grid points to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
