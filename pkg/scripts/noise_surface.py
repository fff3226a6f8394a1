#!/usr/bin/env python3
"""Optimized fidelity over the (transmissivity, excess-noise) plane.

Produces the data behind the two-parameter channel comparison: for each
family the mean fidelity of coherent inputs (sigma = 10) on the product
grid T x eps.
"""

import argparse

from cvteleport.config import ExperimentConfig
from cvteleport.runner import RESULT_COLUMNS, run_surface, write_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="noise_surface.csv")
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--families", default="tmsv,paps,sb")
    args = ap.parse_args()

    cfg = ExperimentConfig(kind="surface",
                           families=args.families.split(","),
                           seed=args.seed, output=args.out)
    cfg.validate()

    rows = run_surface(cfg, jobs=args.jobs)
    write_outputs(rows, RESULT_COLUMNS, args.out, seed=args.seed)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
