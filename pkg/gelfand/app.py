import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .commands import gen, link, naturality, roundtrip, sections, spectrum, validate
from .config import settings
from .exceptions import GelfandError

logger = logging.getLogger("gelfand")

# --- Commands ---
COMMANDS = [validate, spectrum, sections, roundtrip, naturality, link, gen]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="absolute and relative eps for this run")
    common.add_argument("--seed", type=int, default=0, help="generator seed")
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--verbose", "-v", action="count", default=0)

    parser = argparse.ArgumentParser(prog="gelfand", description="Finite Gel'fand duality for commutative C*-categories")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers, common)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = {0: settings.LOG_LEVEL, 1: "INFO"}.get(verbosity, "DEBUG")
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except GelfandError as exc:
        logger.error("❌ %s: %s", type(exc).__name__, exc.detail)
        if args.format == "json":
            sys.stdout.write(json.dumps(exc.to_dict(), default=str) + "\n")
        return exc.exit_code
