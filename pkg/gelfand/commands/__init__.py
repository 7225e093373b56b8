"""CLI verbs. Each module exposes ``register(subparsers, common)``."""

import argparse
import json
import sys
from typing import Optional

import pandas as pd
from pydantic import ValidationError

from ..exceptions import DocumentError
from ..generators import GenParams
from ..numlin import Tolerance


def tolerance_from(args: argparse.Namespace) -> Optional[Tolerance]:
    return Tolerance(args.tol, args.tol) if args.tol is not None else None


def add_gen_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--objects", type=int, default=3, help="number of objects (≤ 8)")
    parser.add_argument("--max-base", type=int, default=3, help="largest base set (≤ 6)")
    parser.add_argument("--density", type=float, default=0.5, help="edge density in [0, 1]")
    parser.add_argument("--phase-mode", choices=["trivial", "random"], default="random")
    parser.add_argument("--scramble", choices=["none", "unitary", "invertible"], default="unitary")


def params_from(args: argparse.Namespace) -> GenParams:
    try:
        return GenParams(
            seed=args.seed,
            n_objects=args.objects,
            max_base=args.max_base,
            edge_density=args.density,
            phase_mode=args.phase_mode,
            scramble=args.scramble,
        )
    except ValidationError as exc:
        error = exc.errors()[0]
        path = ".".join(str(part) for part in error["loc"])
        raise DocumentError(f"invalid generator parameter {path}: {error['msg']}", witness={"path": path}) from exc


def table(rows: list[dict], columns: Optional[list[str]] = None) -> str:
    if not rows:
        return "(none)"
    return pd.DataFrame(rows, columns=columns).to_string(index=False)


def emit(args: argparse.Namespace, payload: dict, text: Optional[str] = None) -> None:
    """Print ``payload`` as JSON, or ``text`` (falling back to key: value lines) for --format text."""
    if args.format == "json":
        sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False, default=str) + "\n")
        return
    if text is None:
        text = "\n".join(f"{key}: {value}" for key, value in payload.items())
    sys.stdout.write(text.rstrip("\n") + "\n")


def report_text(title: str, verdict: bool, failures: list[dict]) -> str:
    status = "✅ pass" if verdict else "❌ fail"
    body = table([{"axiom": f["axiom"], "deviation": f.get("deviation"), "detail": f["detail"]} for f in failures])
    return f"{title}: {status}\n{body if failures else ''}"
