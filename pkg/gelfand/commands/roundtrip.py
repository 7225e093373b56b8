"""``roundtrip``: both natural isomorphisms on one instance."""

import argparse
import logging

from ..documents import read_document, to_domain
from ..duality import verify_evaluation_isomorphism, verify_gelfand_isomorphism
from ..exceptions import DocumentError
from ..functors import sections_category, spectral_spaceoid
from ..generators import gen_category
from ..spaceoid import spaceoids_isomorphic
from . import add_gen_args, emit, params_from, table, tolerance_from

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> int:
    tol = tolerance_from(args)
    oracle = None
    if args.gen:
        c, oracle = gen_category(params_from(args))
        s = oracle
    elif args.input:
        doc = read_document(args.input)
        value = to_domain(doc)
        if doc.kind == "category":
            c = value
            s, _ = spectral_spaceoid(c, tol)
        elif doc.kind == "spaceoid":
            s = value
            c = sections_category(s)
        else:
            raise DocumentError(f"roundtrip needs a category or a spaceoid, got a {doc.kind}", witness={"path": "kind"})
    else:
        raise DocumentError("roundtrip needs --input FILE or --gen", witness={"path": "kind"})

    logger.info("⏳ checking the Gel'fand transform")
    gelfand = verify_gelfand_isomorphism(c, tol)
    logger.info("⏳ checking the evaluation transform")
    evaluation = verify_evaluation_isomorphism(s, tol)
    recovered, _ = spectral_spaceoid(sections_category(s), tol)
    t_side = spaceoids_isomorphic(s, recovered) is not None

    payload = {
        "gelfand": gelfand.summary(),
        "evaluation": evaluation.summary(),
        "spaceoid_recovered": t_side,
    }
    if oracle is not None:
        spectrum, _ = spectral_spaceoid(c, tol)
        payload["oracle_recovered"] = spaceoids_isomorphic(spectrum, oracle) is not None

    passed = gelfand.passed and evaluation.passed and t_side and payload.get("oracle_recovered", True)
    rows = [
        {"check": "gelfand transform", "passed": gelfand.passed, "deviation": max(gelfand.max_isometry_deviation, gelfand.inverse_deviation)},
        {"check": "evaluation transform", "passed": evaluation.passed, "deviation": evaluation.max_isometry_deviation},
        {"check": "S ≅ Σ(Γ(S))", "passed": t_side, "deviation": None},
    ]
    if oracle is not None:
        rows.append({"check": "Σ(C) ≅ oracle", "passed": payload["oracle_recovered"], "deviation": None})
    emit(args, {"passed": passed, **payload}, table(rows))
    return 0 if passed else 2


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("roundtrip", parents=[common], help="check C ≅ Γ(Σ(C)) and S ≅ Σ(Γ(S))")
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--input", help="category or spaceoid JSON")
    source.add_argument("--gen", action="store_true", help="generate an instance from --seed")
    add_gen_args(parser)
    parser.set_defaults(func=run)
