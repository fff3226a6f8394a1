"""Command-line entry point.

Subcommands map one-to-one onto experiment kinds; the config file decides
everything else.  Exit codes: 0 success, 1 configuration error, 2
numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .runner import NumericalFailure, run_experiment, write_outputs

SUBCOMMANDS = ("sweep", "surface", "crossing", "baseline", "oracle-check")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cvteleport",
        description="Teleportation-fidelity experiments over noisy channels")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run a {name} experiment")
        p.add_argument("--config", required=True, help="path to a YAML config")
        p.add_argument("--out", default=None,
                       help="output CSV path (overrides config)")
        p.add_argument("--seed", type=int, default=None,
                       help="optimizer seed (overrides config)")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker processes for grid points")
        p.add_argument("--families", default=None,
                       help="comma-separated family list (overrides config)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg.kind = args.command
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.output = args.out
        if args.families is not None:
            cfg.families = [f.strip() for f in args.families.split(",")
                            if f.strip()]
        cfg.validate()
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        rows, columns = run_experiment(cfg, jobs=max(1, args.jobs))
        with open(args.config, "r", encoding="utf-8") as fh:
            config_text = fh.read()
        write_outputs(rows, columns, cfg.output,
                      json_mirror=cfg.json_mirror,
                      config_text=config_text, seed=cfg.seed)
    except (NumericalFailure, ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(rows)} rows to {cfg.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
