#!/usr/bin/env python3
"""Sweep the scan detector's panel size and record risk against query budget.

Produces a CSV (risk vs. panel size / budget) suitable for plotting the
empirical detectability transition at fixed (n, k, p, q).

Usage:
    python3 scripts/scan_budget_sweep.py --out scan_sweep.csv --trials 200
"""

import argparse
import sys

from densequery.detectors import ScanConfig
from densequery.harness import SCAN, TrialConfig, sweep
from densequery.model import ModelParams


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--k", type=int, default=50)
    ap.add_argument("--p", type=float, default=1.0)
    ap.add_argument("--q", type=float, default=0.5)
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--panels", type=int, nargs="+",
                    default=[8, 10, 12, 14, 17, 20, 24])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--out", default="scan_sweep.csv")
    ap.add_argument("--manifest", default="scan_sweep.manifest.json")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    params = ModelParams.bernoulli(args.n, args.k, args.p, args.q)
    configs = []
    for m in args.panels:
        det = ScanConfig(sample_size=m, epsilon=args.eps)
        configs.append(TrialConfig(
            params=params, detector=SCAN, detector_cfg=det,
            budget=det.budget(), trials=args.trials, master_seed=args.seed,
            label=f"M={m}",
        ))

    for est in sweep(configs, csv_path=args.out, manifest_path=args.manifest,
                     threads=args.threads,
                     progress=lambda c: print(f"running {c.label}",
                                              file=sys.stderr)):
        print(f"{est.config['label']}: budget={est.config['budget']} "
              f"risk={est.risk:.3f} "
              f"(+-{est.half_width_95_type1 + est.half_width_95_type2:.3f})")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
