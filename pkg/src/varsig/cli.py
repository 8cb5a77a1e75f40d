"""Command-line entry point: ``varsig <scenario> --config PATH [--seed N] [--out PATH]``.

Exit statuses: 0 success, 1 unexpected failure, 2 bad usage/config,
3 degenerate posterior, 4 zero evidence, 5 no information, 6 domain error.
Failures print ``ERROR <code> <field-path-or-step> <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .config import SCENARIOS, parse_config
from .errors import ValidationError, VarsigError
from .runner import run_scenario

LOG_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varsig", description="Bayesian learning with action- and state-dependent signal noise")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run a {name!r} scenario")
        p.add_argument("--config", required=True, type=Path, help="scenario JSON file")
        p.add_argument("--seed", type=_u64, default=None, help="override the config seed")
        p.add_argument("--out", type=Path, default=None, help="override the output CSV path")
        p.add_argument("--workers", type=int, default=None, help="threads for multi-replica runs")
    return parser


def _error_line(exc: VarsigError) -> str:
    where = exc.where or "-"
    message = exc.first_message if isinstance(exc, ValidationError) else exc.message
    return f"ERROR {exc.code} {where} {message}"


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("VARSIG_LOG", "quiet").lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.ERROR), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            print(f"ERROR IO_ERROR {args.config} {exc.strerror}", file=sys.stderr)
            return 2
        config = parse_config(text)
        if config.scenario != args.command:
            raise ValidationError([("scenario", f"config is for {config.scenario!r}, command is {args.command!r}")])
        if args.workers is not None and args.workers < 1:
            raise ValidationError([("workers", "must be >= 1")])
        result = run_scenario(config, seed=args.seed, out=args.out, workers=args.workers)
    except VarsigError as exc:
        print(_error_line(exc), file=sys.stderr)
        if isinstance(exc, ValidationError):
            for path, message in exc.errors[1:]:
                print(f"ERROR {exc.code} {path} {message}", file=sys.stderr)
        return exc.exit_status
    print(result.summary())
    return 0


if __name__ == "__main__":
    sys.exit(main())
