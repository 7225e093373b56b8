import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from gelfand.cstarcat import (
    FiniteCStarCategory,
    HilbertBimodule,
    StarFunctor,
    bimodule_norm,
    categories_equal,
    character_matrix,
    characters_of_diagonal,
    check_character,
    check_non_degenerate,
    check_star_functor,
    class_representative,
    compose_star_functors,
    corner,
    cstar_norm,
    enumerate_orbit_classes,
    function_algebra,
    identity_functor,
    inner_product_supports,
    invert_star_functor,
    is_discrete,
    is_full,
    linked_pairs,
    linking_category,
    minimal_idempotents,
    validate_category,
    validate_hilbert_bimodule,
)
from gelfand.exceptions import BimoduleAxiomViolation, InvalidCategory, InvalidFunctor
from gelfand.generators import GenParams, gen_category


# -------------------------------------------------
# Construction and validation
# -------------------------------------------------
def test_build_fills_missing_hom_sets(footnote_embedding):
    source = footnote_embedding.source
    assert source.dim("A", "B") == 0
    assert source.comp[("A", "A", "B")].shape == (1, 0, 0)
    assert is_discrete(source)


def test_build_rejects_bad_shapes():
    with pytest.raises(InvalidCategory):
        FiniteCStarCategory.build(("A",), {("A", "A"): 2}, {("A", "A", "A"): np.zeros((2, 2))})
    with pytest.raises(InvalidCategory):
        FiniteCStarCategory.build(("A", "A"), {})


@pytest.mark.parametrize("name", ["footnote_full", "gamma_e1", "c2"])
def test_valid_categories(name, request):
    report = validate_category(request.getfixturevalue(name))
    assert report.valid, report.failures
    assert {"associativity", "unit_laws", "involution", "commutativity", "positivity"} <= set(report.checks)


def test_non_commutative_algebra_fails(matrix_algebra):
    report = validate_category(matrix_algebra)
    assert "commutativity" in report.failed_axioms()
    assert "positivity" not in report.checks


def test_negative_squares_fail_positivity(negative_full):
    report = validate_category(negative_full)
    assert report.failed_axioms() == {"positivity"}


def test_broken_associativity_is_witnessed(footnote_full):
    comp = dict(footnote_full.comp)
    comp[("A", "B", "A")] = 2 * comp[("A", "B", "A")]
    broken = FiniteCStarCategory.build(footnote_full.objects, footnote_full.dims, comp, footnote_full.invol, footnote_full.unit)
    report = validate_category(broken)
    assert "associativity" in report.failed_axioms()
    failure = next(f for f in report.failures if f.axiom == "associativity")
    assert len(failure.witness["objects"]) == 4


def test_categories_equal(gamma_e1, footnote_full):
    assert categories_equal(gamma_e1, gamma_e1)
    assert not categories_equal(gamma_e1, footnote_full)


# -------------------------------------------------
# Characters
# -------------------------------------------------
def test_function_algebra_characters_are_coordinates():
    c = function_algebra(3)
    assert_allclose(character_matrix(c, "A"), np.eye(3), atol=1e-12)
    assert_allclose(minimal_idempotents(c, "A"), np.eye(3), atol=1e-12)


def test_c2_characters_in_descending_order(c2):
    characters = characters_of_diagonal(c2, "A")
    assert [ch.object_assignment for ch in characters] == [{"A": 0}, {"A": 1}]
    assert_allclose(characters[0].hom_values[("A", "A")], [1.0, 1.0], atol=1e-12)
    assert_allclose(characters[1].hom_values[("A", "A")], [1.0, -1.0], atol=1e-12)
    assert_allclose(minimal_idempotents(c2, "A")[0], [0.5, 0.5], atol=1e-12)


def test_characters_of_unknown_object(c2):
    with pytest.raises(InvalidCategory):
        characters_of_diagonal(c2, "Z")


# -------------------------------------------------
# Corners
# -------------------------------------------------
def test_corners_of_gamma_e1(gamma_e1):
    assert corner(gamma_e1, "A", "B", 0, 0).shape == (1, 1)
    assert corner(gamma_e1, "A", "B", 1, 1).shape == (1, 0)
    assert corner(gamma_e1, "A", "B", 0, 2).shape == (1, 0)
    frame = linked_pairs(gamma_e1)
    assert frame.linked("A", "B") == [(0, 0)]
    assert frame.linked("B", "A") == [(0, 0)]
    assert frame.partner("B", 2, "A") is None


def test_fullness(footnote_full, gamma_e1):
    assert is_full(footnote_full)
    assert not is_full(gamma_e1)
    assert inner_product_supports(gamma_e1, "A", "B") == ({0}, {0})


def test_cstar_norm(gamma_e1):
    assert cstar_norm(gamma_e1, "A", "A", [3.0, -4.0]) == pytest.approx(4.0)
    assert cstar_norm(gamma_e1, "A", "B", [2j]) == pytest.approx(2.0)


# -------------------------------------------------
# Orbit classes
# -------------------------------------------------
def test_orbit_classes_of_gamma_e1(gamma_e1):
    classes = enumerate_orbit_classes(gamma_e1)
    assert {c.characters for c in classes} == {
        (("A", 0), ("B", 0)),
        (("A", 1), ("B", 1)),
        (("A", 1), ("B", 2)),
    }
    linked = next(c for c in classes if c.character_of("A") == 0)
    assert linked.components == (("A", "B"),)
    assert linked.zero_homs == frozenset()
    split = next(c for c in classes if c.character_of("B") == 2)
    assert split.zero_homs == {("A", "B"), ("B", "A")}


def test_orbit_classes_of_footnote_categories(footnote_full, footnote_embedding):
    (full,) = enumerate_orbit_classes(footnote_full)
    assert full.components == (("A", "B"),)
    (diagonal,) = enumerate_orbit_classes(footnote_embedding.source)
    assert diagonal.components == (("A",), ("B",))
    assert diagonal.to_dict()["zero_homs"] == ["A|B", "B|A"]


@pytest.mark.parametrize("name", ["footnote_full", "gamma_e1"])
def test_class_representatives_are_characters(name, request):
    c = request.getfixturevalue(name)
    for orbit_class in enumerate_orbit_classes(c):
        report = check_character(c, class_representative(c, orbit_class))
        assert report.valid, report.failures


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_class_representatives_in_scrambled_bases(seed):
    c, _ = gen_category(GenParams(seed=seed, n_objects=3, max_base=3, scramble="invertible"))
    for orbit_class in enumerate_orbit_classes(c):
        assert check_character(c, class_representative(c, orbit_class)).valid


def test_check_character_rejects_scaled_character(footnote_full):
    (orbit_class,) = enumerate_orbit_classes(footnote_full)
    omega = class_representative(footnote_full, orbit_class)
    omega.hom_values[("A", "A")] = 2 * omega.hom_values[("A", "A")]
    assert "unital" in check_character(footnote_full, omega).failed_axioms()


# -------------------------------------------------
# *-functors
# -------------------------------------------------
def test_identity_and_composition(gamma_e1, e1_rescaling):
    assert check_star_functor(identity_functor(gamma_e1)).valid
    assert check_star_functor(e1_rescaling).valid
    twice = compose_star_functors(e1_rescaling, e1_rescaling)
    assert_allclose(twice.hom_maps[("A", "B")], [[-1.0]], atol=1e-12)
    inverse = invert_star_functor(e1_rescaling)
    assert_allclose(inverse.hom_maps[("A", "B")], [[-1j]], atol=1e-12)
    back = compose_star_functors(e1_rescaling, inverse)
    for m in back.hom_maps.values():
        assert_allclose(m, np.eye(m.shape[0]), atol=1e-12)


def test_compose_requires_matching_endpoints(e1_rescaling, footnote_embedding):
    with pytest.raises(InvalidFunctor):
        compose_star_functors(footnote_embedding, e1_rescaling)


def test_check_star_functor_catches_broken_involution(e1_rescaling):
    hom_maps = dict(e1_rescaling.hom_maps)
    hom_maps[("B", "A")] = np.array([[1j]])
    broken = type(e1_rescaling)(e1_rescaling.source, e1_rescaling.target, e1_rescaling.obj_map, hom_maps)
    assert "involutive" in check_star_functor(broken).failed_axioms()


def test_footnote_embedding_is_a_degenerate_star_functor(footnote_embedding):
    assert check_star_functor(footnote_embedding).valid
    gate = check_non_degenerate(footnote_embedding)
    assert not gate
    assert gate.witness.source_pair == ("A", "B")
    assert gate.witness.point == (0, 0)


def test_identity_functor_is_non_degenerate(gamma_e1, footnote_full):
    assert check_non_degenerate(identity_functor(gamma_e1))
    assert check_non_degenerate(identity_functor(footnote_full))


def test_functor_into_empty_hom_sets_is_reported(footnote_full, footnote_embedding):
    # C_AB is one-dimensional in the source and zero in diag(ℂ, ℂ)
    diagonal = footnote_embedding.source
    collapse = StarFunctor.build(footnote_full, diagonal, {"A": "A", "B": "B"}, {("A", "A"): [[1.0]], ("B", "B"): [[1.0]]})
    assert collapse.hom_maps[("A", "B")].shape == (0, 1)
    report = check_star_functor(collapse)
    assert report.failed_axioms() == {"functorial"}
    assert {tuple(f.witness["objects"]) for f in report.failures} >= {("A", "B", "A"), ("B", "A", "B")}


# -------------------------------------------------
# Hilbert bimodules
# -------------------------------------------------
def test_nonfull_bimodule_linking_category(nonfull_bimodule):
    assert validate_hilbert_bimodule(nonfull_bimodule).valid
    linked = linking_category(nonfull_bimodule)
    assert linked.objects == ("A", "B")
    assert (linked.dim("A", "A"), linked.dim("A", "B"), linked.dim("B", "B")) == (2, 2, 3)
    assert validate_category(linked).valid
    assert linking_category(nonfull_bimodule) is linked
    assert bimodule_norm(nonfull_bimodule, [0.0, 3.0]) == pytest.approx(3.0)


def test_linking_category_carries_the_bimodule_structure(nonfull_bimodule):
    m = nonfull_bimodule
    linked = linking_category(m)
    a, b = m.alg_a.objects[0], m.alg_b.objects[0]
    assert_allclose(linked.comp[("A", "A", "A")], m.alg_a.comp[(a, a, a)])
    assert_allclose(linked.comp[("B", "B", "B")], m.alg_b.comp[(b, b, b)])
    assert_allclose(linked.comp[("A", "A", "B")], m.left_action)
    assert_allclose(linked.comp[("A", "B", "B")], m.right_action)
    assert_allclose(linked.comp[("A", "B", "A")], m.ip_a)
    assert_allclose(linked.comp[("B", "A", "B")], m.ip_b)

    x, y = np.array([2.0, 1j]), np.array([1.0, -1.0])
    assert_allclose(linked.compose("A", "B", "A", x, linked.adjoint("A", "B", y)), m.inner_a(x, y), atol=1e-12)
    assert_allclose(linked.compose("B", "A", "B", linked.adjoint("A", "B", x), y), m.inner_b(x, y), atol=1e-12)
    # δ_1 ∘ m_0 = m_0 and m_0 ∘ δ_2' = 0
    assert_allclose(linked.compose("A", "A", "B", [1.0, 0.0], [1.0, 0.0]), [1.0, 0.0], atol=1e-12)
    assert_allclose(linked.compose("A", "B", "B", [1.0, 0.0], [0.0, 1.0, 0.0]), [0.0, 0.0], atol=1e-12)
    # n* ∘ a = (a* ∘ n)*
    assert_allclose(linked.compose("B", "A", "A", [1.0, 0.0], [1.0, 0.0]), [1.0, 0.0], atol=1e-12)


def test_negative_inner_products_are_rejected(nonfull_bimodule):
    m = nonfull_bimodule
    negated = HilbertBimodule(m.alg_a, m.alg_b, m.module_dim, m.left_action, m.right_action, -m.ip_a, -m.ip_b)
    assert "positivity" in validate_hilbert_bimodule(negated).failed_axioms()
    with pytest.raises(BimoduleAxiomViolation):
        linking_category(negated)


def test_incompatible_inner_products_are_rejected(nonfull_bimodule):
    m = nonfull_bimodule
    ip_b = m.ip_b.copy()
    ip_b[1, 1, 1] = 2.0
    broken = HilbertBimodule(m.alg_a, m.alg_b, m.module_dim, m.left_action, m.right_action, m.ip_a, ip_b)
    assert "compatibility" in validate_hilbert_bimodule(broken).failed_axioms()
