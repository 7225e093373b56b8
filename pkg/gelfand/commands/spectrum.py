"""``spectrum``: Σ of a category, with its Gel'fand data."""

import argparse

from ..cstarcat import validate_category
from ..documents import gelfand_data_document, read_document, spaceoid_document, to_category
from ..exceptions import InvalidCategory
from ..functors import spectral_spaceoid
from ..spaceoid import pair_components
from . import emit, table, tolerance_from


def run(args: argparse.Namespace) -> int:
    tol = tolerance_from(args)
    c = to_category(read_document(args.input, "category"))
    report = validate_category(c, tol)
    if not report.valid:
        raise InvalidCategory("input is not a commutative C*-category", witness=[f.model_dump() for f in report.failures])
    s, data = spectral_spaceoid(c, tol)

    payload = {"spaceoid": spaceoid_document(s), "gelfand_data": gelfand_data_document(data)}
    rows = [
        {"hom": f"{a}|{b}", "dim": c.dim(a, b), "points": len(s.points[(a, b)])}
        for a, b in c.pairs(off_diagonal=True)
    ]
    text = "\n".join(
        [
            "base sets: " + ", ".join(f"{a}: {len(xs)}" for a, xs in s.base_sets.items()),
            table(rows),
            f"maximal pair subgroupoids: {len(pair_components(s))}",
        ]
    )
    emit(args, payload, text)
    return 0


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("spectrum", parents=[common], help="spectral spaceoid of a category")
    parser.add_argument("--input", required=True, help="category JSON")
    parser.set_defaults(func=run)
