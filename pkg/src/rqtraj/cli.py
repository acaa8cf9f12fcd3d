"""Command-line front end.

Subcommands: trajectory, nodes, tunnel, residuals, sweep.  All take a JSON
scenario config (--config), write one machine-readable artifact (--out,
--format) and print a JSON summary to stdout.  Exit codes: 0 success, 1
validation error, 2 numerical-boundary event.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import TASKS, parse_config
from .errors import IoError, RqtrajError, SchemaError
from .runner import run_scenario

_TASK_HELP = {
    "trajectory": "sample x(t), velocity, momentum, action and residuals on a time grid",
    "nodes": "node coordinates, spacings and mean velocity for a constant potential",
    "tunnel": "barrier traversal delay with thin/thick asymptotics",
    "residuals": "max conservation residuals over randomized microstates",
    "sweep": "fan a nodes or tunnel computation over parameter grids",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rqtraj",
        description="Quantum trajectories of a relativistic spinless particle in 1D.",
    )
    sub = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        sp = sub.add_parser(task, help=_TASK_HELP[task])
        sp.add_argument("--config", required=True, help="path to the JSON scenario document")
        sp.add_argument("--out", default=None, help="artifact path (default: <task>.<format>)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument(
            "--seed", type=int, default=0,
            help="RNG seed for randomized residual scenarios (ignored elsewhere)",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text, default_task=args.task)
    except SchemaError as exc:
        for path, msg in exc.violations:
            print(f"config error at {path}: {msg}", file=sys.stderr)
        return 1
    out = args.out or f"{args.task}.{args.format}"
    try:
        summary, code = run_scenario(cfg, out, args.format, args.seed)
    except SchemaError as exc:
        for path, msg in exc.violations:
            print(f"config error at {path}: {msg}", file=sys.stderr)
        return 1
    except (ValueError, IoError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RqtrajError as exc:
        print(f"numerical boundary: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary, indent=2))
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
