"""``link``: spectral picture of a Hilbert bimodule."""

import argparse

from ..documents import algebra_labels, read_document, to_bimodule
from ..duality import bimodule_spectrum, verify_bimodule_isomorphism
from . import emit, tolerance_from


def run(args: argparse.Namespace) -> int:
    tol = tolerance_from(args)
    doc = read_document(args.input, "bimodule")
    m = to_bimodule(doc)
    spectrum = bimodule_spectrum(m, tol)
    check = verify_bimodule_isomorphism(m, spectrum, tol)

    summary = spectrum.summary(algebra_labels(doc.alg_a), algebra_labels(doc.alg_b))
    payload = {**summary, "isomorphism": check.summary()}
    pairs = ", ".join(f"({p}, {q})" for p, q in summary["partial_bijection"]) or "∅"
    text = "\n".join(
        [
            f"partial bijection: {pairs}",
            f"left support: {summary['left_support']} ({'full' if spectrum.full_left else 'proper'})",
            f"right support: {summary['right_support']} ({'full' if spectrum.full_right else 'proper'})",
            f"M ≅ sections: {'✅' if check.passed else '❌'} (deviation {check.max_isometry_deviation:.3e})",
        ]
    )
    emit(args, payload, text)
    return 0 if check.passed else 2


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("link", parents=[common], help="partial bijection of a Hilbert bimodule")
    parser.add_argument("--input", required=True, help="bimodule JSON")
    parser.set_defaults(func=run)
