import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from gelfand.cstarcat import HilbertBimodule, function_algebra, identity_functor
from gelfand.duality import (
    bimodule_spectrum,
    check_naturality_E,
    check_naturality_G,
    evaluation_transform,
    gelfand_transform,
    verify_bimodule_isomorphism,
    verify_evaluation_isomorphism,
    verify_gelfand_isomorphism,
)
from gelfand.exceptions import DegenerateFunctor, InvalidCategory
from gelfand.generators import GenParams, gen_category, gen_functor_pair, gen_morphism, gen_spaceoid
from gelfand.spaceoid import identity_morphism, validate_morphism


# -------------------------------------------------
# Gel'fand transform
# -------------------------------------------------
@pytest.mark.parametrize("name", ["footnote_full", "gamma_e1", "c2"])
def test_gelfand_isomorphism_on_fixtures(name, request):
    report = verify_gelfand_isomorphism(request.getfixturevalue(name))
    assert report.passed, report.summary()
    assert report.bijective
    assert report.max_isometry_deviation <= 1e-6


def test_gelfand_transform_of_c2(c2):
    transform = gelfand_transform(c2)
    assert_allclose(transform.hom_maps[("A", "A")], [[1.0, 1.0], [1.0, -1.0]], atol=1e-12)


def test_gelfand_transform_rejects_invalid_categories(matrix_algebra, negative_full):
    for c in (matrix_algebra, negative_full):
        with pytest.raises(InvalidCategory):
            gelfand_transform(c)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scramble=st.sampled_from(["unitary", "invertible"]))
def test_gelfand_isomorphism_on_generated_categories(seed, scramble):
    c, _ = gen_category(GenParams(seed=seed, n_objects=3, max_base=4, scramble=scramble))
    report = verify_gelfand_isomorphism(c)
    assert report.passed, report.summary()


# -------------------------------------------------
# Evaluation transform
# -------------------------------------------------
def test_evaluation_transform_of_e1(e1):
    ev = evaluation_transform(e1)
    assert ev.base_map == {"A": {"1": "0", "2": "1"}, "B": {"1'": "0", "2'": "1", "3'": "2"}}
    assert ev.point_map == {"p": "A#0>B#0", "p*": "B#0>A#0"}
    assert abs(ev.scalar("p")) == pytest.approx(1.0)
    assert validate_morphism(ev).valid


@pytest.mark.parametrize("name", ["e1", "s0"])
def test_evaluation_isomorphism_on_fixtures(name, request):
    report = verify_evaluation_isomorphism(request.getfixturevalue(name))
    assert report.passed, report.summary()


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4))
def test_evaluation_isomorphism_on_generated_spaceoids(seed, n):
    s = gen_spaceoid(GenParams(seed=seed, n_objects=n))
    assert verify_evaluation_isomorphism(s).passed


# -------------------------------------------------
# Naturality
# -------------------------------------------------
def test_naturality_of_gelfand_transform_at_identity(gamma_e1):
    report = check_naturality_G(identity_functor(gamma_e1))
    assert report.passed
    assert report.square_identity <= 1e-10


def test_naturality_of_gelfand_transform_at_rescaling(e1_rescaling):
    report = check_naturality_G(e1_rescaling)
    assert report.passed
    assert report.square_identity <= 1e-9


def test_naturality_needs_a_non_degenerate_functor(footnote_embedding):
    with pytest.raises(DegenerateFunctor):
        check_naturality_G(footnote_embedding)


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_naturality_of_gelfand_transform_on_scrambled_functors(seed):
    first, second = gen_functor_pair(GenParams(seed=seed, n_objects=3, max_base=3))
    for functor in (first, second):
        report = check_naturality_G(functor)
        assert report.passed, report.summary()


def test_naturality_of_evaluation_at_identity(e1):
    report = check_naturality_E(identity_morphism(e1))
    assert report.passed
    assert report.square_identity <= 1e-10


def test_naturality_of_evaluation_at_phase_automorphism(e1_phase_automorphism):
    report = check_naturality_E(e1_phase_automorphism)
    assert report.passed, report.summary()
    assert {w.location for w in report.witnesses} == {"p", "p*"}


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_naturality_of_evaluation_on_generated_morphisms(seed):
    target = gen_spaceoid(GenParams(seed=seed, n_objects=3))
    report = check_naturality_E(gen_morphism(target, GenParams(seed=seed)))
    assert report.passed, report.summary()


# -------------------------------------------------
# Hilbert bimodules
# -------------------------------------------------
def test_nonfull_bimodule_spectrum(nonfull_bimodule):
    spectrum = bimodule_spectrum(nonfull_bimodule)
    assert spectrum.partial_bijection == [(0, 0), (1, 1)]
    assert spectrum.left_support == {0, 1}
    assert spectrum.right_support == {0, 1}
    assert spectrum.full_left
    assert not spectrum.full_right
    summary = spectrum.summary(["1", "2"], ["1'", "2'", "3'"])
    assert summary["partial_bijection"] == [["1", "1'"], ["2", "2'"]]
    assert summary["right_support"] == ["1'", "2'"]

    report = verify_bimodule_isomorphism(nonfull_bimodule, spectrum)
    assert report.passed, report.summary()
    assert report.max_isometry_deviation <= 1e-9
    assert report.threshold == pytest.approx(1e-9)


def single_point_bimodule(module_dim: int) -> HilbertBimodule:
    ones = np.ones((1, 1, 1)) if module_dim else None
    shape_a, shape_b = (1, module_dim, module_dim), (module_dim, 1, module_dim)
    return HilbertBimodule(
        function_algebra(1, "A"),
        function_algebra(1, "B"),
        module_dim,
        ones if module_dim else np.zeros(shape_a),
        ones if module_dim else np.zeros(shape_b),
        ones if module_dim else np.zeros((0, 0, 1)),
        ones if module_dim else np.zeros((0, 0, 1)),
    )


def test_zero_bimodule_has_empty_partial_bijection():
    spectrum = bimodule_spectrum(single_point_bimodule(0))
    assert spectrum.partial_bijection == []
    assert not spectrum.full_left and not spectrum.full_right
    assert verify_bimodule_isomorphism(single_point_bimodule(0), spectrum).passed


def test_imprimitivity_bimodule_is_a_bijection():
    m = single_point_bimodule(1)
    spectrum = bimodule_spectrum(m)
    assert spectrum.partial_bijection == [(0, 0)]
    assert spectrum.full_left and spectrum.full_right
    assert verify_bimodule_isomorphism(m, spectrum).passed


def test_scaled_bimodule_keeps_its_partial_bijection(nonfull_bimodule):
    m = nonfull_bimodule
    # e'_0 = 2·e_0 changes the inner products by |2|² on that generator
    ip_a, ip_b = m.ip_a.copy(), m.ip_b.copy()
    ip_a[0, 0, 0] = ip_b[0, 0, 0] = 4.0
    scaled = HilbertBimodule(m.alg_a, m.alg_b, m.module_dim, m.left_action, m.right_action, ip_a, ip_b)
    spectrum = bimodule_spectrum(scaled)
    assert spectrum.partial_bijection == [(0, 0), (1, 1)]
    assert verify_bimodule_isomorphism(scaled, spectrum).passed
