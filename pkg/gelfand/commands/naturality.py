"""``naturality``: the naturality square for a supplied functor or morphism."""

import argparse

from ..documents import read_document, to_domain
from ..duality import check_naturality_E, check_naturality_G
from ..exceptions import DocumentError
from . import emit, table, tolerance_from


def run(args: argparse.Namespace) -> int:
    tol = tolerance_from(args)
    doc = read_document(args.input)
    if doc.kind == "functor":
        report = check_naturality_G(to_domain(doc), tol)
    elif doc.kind == "morphism":
        report = check_naturality_E(to_domain(doc), tol)
    else:
        raise DocumentError(f"naturality needs a functor or a morphism, got a {doc.kind}", witness={"path": "kind"})

    rows = sorted((w.model_dump() for w in report.witnesses), key=lambda w: -w["deviation"])[:10]
    text = f"{report.square} square: {'✅ pass' if report.passed else '❌ fail'} (max deviation {report.square_identity:.3e})\n{table(rows)}"
    if report.structural_mismatches:
        text += "\n" + "\n".join(report.structural_mismatches)
    emit(args, report.summary(), text)
    return 0 if report.passed else 2


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("naturality", parents=[common], help="naturality of the Gel'fand or evaluation transform")
    parser.add_argument("--input", required=True, help="functor or morphism JSON")
    parser.set_defaults(func=run)
