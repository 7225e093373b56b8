"""``validate``: check a document of any kind against its axioms."""

import argparse

from ..cstarcat import check_non_degenerate, check_star_functor, validate_category, validate_hilbert_bimodule
from ..documents import read_document, to_domain
from ..spaceoid import validate_morphism, validate_spaceoid
from . import emit, report_text, tolerance_from


def run(args: argparse.Namespace) -> int:
    tol = tolerance_from(args)
    doc = read_document(args.input)
    value = to_domain(doc)

    gate = None
    if doc.kind == "category":
        report = validate_category(value, tol)
    elif doc.kind == "spaceoid":
        report = validate_spaceoid(value, tol)
    elif doc.kind == "morphism":
        report = validate_morphism(value, tol)
    elif doc.kind == "functor":
        report = check_star_functor(value, tol)
        if report.valid:
            gate = check_non_degenerate(value, tol)
    else:
        report = validate_hilbert_bimodule(value, tol)

    payload = {"kind": doc.kind, **report.summary()}
    if gate is not None:
        payload["non_degenerate"] = gate.model_dump()
    failures = [f.model_dump() for f in report.failures]
    text = report_text(f"{doc.kind} {args.input}", report.valid, failures)
    if gate is not None:
        text += f"\nnon-degenerate: {'yes' if gate else 'no, at ' + str(gate.witness.model_dump())}"
    emit(args, payload, text)

    if not report.valid:
        return 2
    return 3 if gate is not None and not gate else 0


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("validate", parents=[common], help="validate a category, spaceoid, morphism, functor or bimodule")
    parser.add_argument("--input", required=True, help="JSON document; its kind is detected from its keys")
    parser.set_defaults(func=run)
