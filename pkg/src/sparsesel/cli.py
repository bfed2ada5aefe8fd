"""Command-line entry point: ``sparsesel {simulate,fit,diagnose}``."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .core import SelectionError
from .experiment import run_diagnose, run_fit, run_simulate
from .io import load_config

COMMANDS = {"simulate": run_simulate, "fit": run_fit, "diagnose": run_diagnose}


def _support_arg(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated column indices, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON config file")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--threads", type=int, help="worker processes for replicates")
    common.add_argument("--budget", type=int, help="max subsets enumerated per exhaustive search")
    common.add_argument("--standardize", choices=("zscore", "unitnorm", "none"), help="column scaling")

    parser = argparse.ArgumentParser(prog="sparsesel", description="Sparse variable selection experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="replicated TPR-FDR curves on synthetic data")
    fit = sub.add_parser("fit", parents=[common], help="train/test evaluation on a CSV")
    fit.add_argument("--input", help="CSV with a header row")
    fit.add_argument("--response", help="name of the response column")
    diag = sub.add_parser("diagnose", parents=[common], help="recoverability diagnostics")
    diag.add_argument("--input", help="CSV with a header row")
    diag.add_argument("--response", help="name of the response column")
    diag.add_argument("--truth", type=_support_arg, help="true support as 0-based column indices, e.g. 0,3,7")
    diag.add_argument("--fixture", choices=("corner",), help="built-in design instead of data")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    cfg = load_config(args.config) if args.config else {}
    for key in ("seed", "out", "threads", "budget", "standardize", "input", "response", "truth", "fixture"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        written = COMMANDS[args.command](cfg)
    except SelectionError as exc:
        print(f"sparsesel {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"sparsesel {args.command}: I/O error: {exc}", file=sys.stderr)
        return 3
    for path in written.values():
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
