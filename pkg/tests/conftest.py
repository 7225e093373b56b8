"""Shared fixtures: the JSON fixtures as domain values plus a few small algebras."""

from pathlib import Path

import numpy as np
import pytest

from gelfand.cstarcat import FiniteCStarCategory, algebra
from gelfand.documents import read_document, to_domain
from gelfand.spaceoid import FiniteSpaceoid, Point

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name: str):
    return to_domain(read_document(FIXTURES / name))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def footnote_full():
    """[[ℂ, ℂ], [ℂ, ℂ]]: two objects, every Hom-set one-dimensional."""
    return load("footnote_full.json")


@pytest.fixture
def footnote_embedding():
    """diag(ℂ, ℂ) → [[ℂ, ℂ], [ℂ, ℂ]]: a *-functor that kills the off-diagonal spectrum."""
    return load("footnote_embedding.json")


@pytest.fixture
def e1():
    """X_A = {1, 2}, X_B = {1', 2', 3'} with one point p over (1, 1')."""
    return load("e1_spaceoid.json")


@pytest.fixture
def gamma_e1():
    return load("e1_sections.json")


@pytest.fixture
def e1_rescaling():
    return load("e1_rescaling.json")


@pytest.fixture
def e1_phase_automorphism():
    return load("e1_phase_automorphism.json")


@pytest.fixture
def nonfull_bimodule():
    return load("nonfull_bimodule.json")


@pytest.fixture
def s0():
    return FiniteSpaceoid.build(("A",), {"A": ["x"]})


@pytest.fixture
def c2():
    """ℂ² in the basis {1, s} with s² = 1."""
    comp = np.zeros((2, 2, 2))
    comp[0, 0, 0] = comp[0, 1, 1] = comp[1, 0, 1] = comp[1, 1, 0] = 1.0
    return algebra(2, comp, np.eye(2), [1.0, 0.0])


@pytest.fixture
def matrix_algebra():
    """M₂(ℂ) in matrix units: a C*-algebra that is not commutative."""
    comp = np.zeros((4, 4, 4))
    invol = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            invol[2 * j + i, 2 * i + j] = 1.0
            for k in range(2):
                comp[2 * i + j, 2 * j + k, 2 * i + k] = 1.0
    return algebra(4, comp, invol, [1.0, 0.0, 0.0, 1.0])


@pytest.fixture
def negative_full():
    """[[ℂ, ℂ], [ℂ, ℂ]] with x*∘x = −1 on the off-diagonal generators."""
    dims = {pair: 1 for pair in (("A", "A"), ("A", "B"), ("B", "A"), ("B", "B"))}
    comp = {}
    for triple in [(a, b, c) for a in "AB" for b in "AB" for c in "AB"]:
        comp[triple] = np.ones((1, 1, 1))
    comp[("A", "B", "A")] = -np.ones((1, 1, 1))
    comp[("B", "A", "B")] = -np.ones((1, 1, 1))
    invol = {pair: np.ones((1, 1)) for pair in dims}
    return FiniteCStarCategory.build(("A", "B"), dims, comp, invol, {"A": [1.0], "B": [1.0]})


@pytest.fixture
def broken_closure():
    """Points a1→b1→c1 compose, but the only point of X_AC runs a1→c2."""
    points = {
        ("A", "B"): [Point("p", "a1", "b1")],
        ("B", "A"): [Point("p*", "b1", "a1")],
        ("B", "C"): [Point("q", "b1", "c1")],
        ("C", "B"): [Point("q*", "c1", "b1")],
        ("A", "C"): [Point("r", "a1", "c2")],
        ("C", "A"): [Point("r*", "c2", "a1")],
    }
    return FiniteSpaceoid.build(("A", "B", "C"), {"A": ["a1"], "B": ["b1"], "C": ["c1", "c2"]}, points)
