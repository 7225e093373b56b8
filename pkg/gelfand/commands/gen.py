"""``gen``: write a generated category and its oracle spaceoid."""

import argparse
import logging
from pathlib import Path

from ..documents import category_document, spaceoid_document, write_json
from ..exceptions import DocumentError
from ..generators import gen_category
from . import add_gen_args, emit, params_from

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> int:
    params = params_from(args)
    c, oracle = gen_category(params)
    payload = {"params": params.model_dump(), "category": category_document(c), "oracle": spaceoid_document(oracle)}
    if args.out is None:
        emit(args, payload)
        return 0

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DocumentError(f"cannot create {out}: {exc.strerror}", witness={"path": str(out)}) from exc
    write_json(out / "category.json", payload["category"])
    write_json(out / "oracle.json", payload["oracle"])
    logger.info("✅ wrote %s and %s", out / "category.json", out / "oracle.json")
    emit(args, {"category": str(out / "category.json"), "oracle": str(out / "oracle.json"), "params": payload["params"]})
    return 0


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("gen", parents=[common], help="generate a category with its oracle spaceoid")
    parser.add_argument("--out", help="directory for category.json and oracle.json (stdout if omitted)")
    add_gen_args(parser)
    parser.set_defaults(func=run)
