"""``sections``: Γ of a spaceoid."""

import argparse

from ..documents import category_document, read_document, to_spaceoid
from ..functors import sections_category
from . import emit, table


def run(args: argparse.Namespace) -> int:
    s = to_spaceoid(read_document(args.input, "spaceoid"))
    c = sections_category(s)
    rows = [{"hom": f"{a}|{b}", "dim": c.dim(a, b)} for a, b in c.pairs()]
    emit(args, category_document(c), table(rows))
    return 0


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("sections", parents=[common], help="category of sections of a spaceoid")
    parser.add_argument("--input", required=True, help="spaceoid JSON")
    parser.set_defaults(func=run)
