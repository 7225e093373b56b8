"""End-to-end sweeps over generated instances. Run with ``pytest -m slow``."""

import numpy as np
import pytest

from gelfand.config import settings
from gelfand.cstarcat import (
    character_matrix,
    check_non_degenerate,
    check_star_functor,
    compose_star_functors,
    corner,
    cstar_norm,
    identity_functor,
    validate_category,
)
from gelfand.duality import (
    bimodule_spectrum,
    check_naturality_E,
    check_naturality_G,
    verify_bimodule_isomorphism,
    verify_evaluation_isomorphism,
    verify_gelfand_isomorphism,
)
from gelfand.exceptions import DegenerateFunctor
from gelfand.functors import gamma_on_morphism, sections_category, sigma_on_morphism, spectral_spaceoid
from gelfand.generators import GenParams, gen_category, gen_functor_pair, gen_morphism, gen_morphism_pair, gen_spaceoid, make_rng
from gelfand.spaceoid import compose_morphisms, morphisms_equal, spaceoids_isomorphic

pytestmark = pytest.mark.slow


def sweep_params(seed: int, scramble: str = "unitary") -> GenParams:
    # object counts cycle through 1..MAX_OBJECTS, densities through 0.0..1.0 in steps of 0.2
    return GenParams(
        seed=seed,
        n_objects=1 + seed % settings.MAX_OBJECTS,
        max_base=1 + (seed // settings.MAX_OBJECTS) % 6,
        edge_density=((seed // 3) % 6) / 5,
        scramble=scramble,
    )


def dense_params(seed: int, scramble: str = "unitary") -> GenParams:
    return GenParams(seed=seed, n_objects=4, max_base=5, edge_density=0.8, scramble=scramble)


@pytest.mark.parametrize("start", range(0, 200, 40))
def test_gelfand_isomorphism_sweep(start):
    for seed in range(start, start + 40):
        c, _ = gen_category(sweep_params(seed))
        assert validate_category(c).valid, seed
        report = verify_gelfand_isomorphism(c)
        assert report.passed, (seed, report.summary())


@pytest.mark.parametrize("start", range(1000, 1200, 40))
def test_spaceoid_round_trip_sweep(start):
    for seed in range(start, start + 40):
        s = gen_spaceoid(sweep_params(seed))
        recovered, _ = spectral_spaceoid(sections_category(s))
        assert spaceoids_isomorphic(s, recovered) is not None, seed
        assert verify_evaluation_isomorphism(s).passed, seed


@pytest.mark.parametrize("start", range(2000, 2200, 40))
def test_oracle_recovery_under_invertible_scramble(start):
    for seed in range(start, start + 40):
        c, oracle = gen_category(sweep_params(seed, "invertible"))
        spectrum, _ = spectral_spaceoid(c)
        assert spaceoids_isomorphic(spectrum, oracle) is not None, seed


@pytest.mark.parametrize("seed", range(3000, 3040))
def test_corners_split_every_hom_set(seed):
    c, _ = gen_category(sweep_params(seed))
    for a, b in c.pairs(off_diagonal=True):
        n_a, n_b = len(character_matrix(c, a)), len(character_matrix(c, b))
        dims = [corner(c, a, b, p, q).shape[1] for p in range(n_a) for q in range(n_b)]
        assert set(dims) <= {0, 1}
        assert sum(dims) == c.dim(a, b)


def test_footnote_embedding_is_degenerate(footnote_embedding):
    assert check_star_functor(footnote_embedding).valid
    result = check_non_degenerate(footnote_embedding)
    assert not result
    assert result.witness.source_pair == ("A", "B")
    with pytest.raises(DegenerateFunctor):
        sigma_on_morphism(footnote_embedding)


@pytest.mark.parametrize("seed", range(4000, 4050))
def test_identity_functors_are_non_degenerate(seed):
    c, _ = gen_category(sweep_params(seed))
    assert check_non_degenerate(identity_functor(c))


@pytest.mark.parametrize("seed", range(5000, 5050))
def test_sigma_functoriality_sweep(seed):
    first, second = gen_functor_pair(sweep_params(seed, ("none", "unitary", "invertible")[seed % 3]))
    composite = sigma_on_morphism(compose_star_functors(first, second))
    assert morphisms_equal(composite, compose_morphisms(sigma_on_morphism(second), sigma_on_morphism(first)))


@pytest.mark.parametrize("seed", range(6000, 6050))
def test_gamma_functoriality_sweep(seed):
    m1, m2 = gen_morphism_pair(sweep_params(seed))
    composite = gamma_on_morphism(compose_morphisms(m1, m2))
    expected = compose_star_functors(gamma_on_morphism(m2), gamma_on_morphism(m1))
    assert composite.obj_map == expected.obj_map
    for pair, m in composite.hom_maps.items():
        np.testing.assert_allclose(m, expected.hom_maps[pair], atol=1e-9)


@pytest.mark.parametrize("seed", range(7000, 7050))
def test_naturality_sweep(seed):
    first, _ = gen_functor_pair(sweep_params(seed, ("unitary", "invertible")[seed % 2]))
    assert check_naturality_G(first).passed, seed
    m = gen_morphism(gen_spaceoid(sweep_params(seed)), sweep_params(seed))
    assert check_naturality_E(m).passed, seed


def test_nonfull_bimodule_acceptance(nonfull_bimodule):
    spectrum = bimodule_spectrum(nonfull_bimodule)
    assert spectrum.partial_bijection == [(0, 0), (1, 1)]
    assert verify_bimodule_isomorphism(nonfull_bimodule, spectrum).passed


def test_cstar_identity_on_random_elements():
    rng = make_rng(8000)
    checked = 0
    seed = 8000
    while checked < 1000:
        c, _ = gen_category(sweep_params(seed))
        seed += 1
        for a, b in c.pairs():
            d = c.dim(a, b)
            if d == 0:
                continue
            for _ in range(5):
                x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
                square = c.compose(b, a, b, c.adjoint(a, b, x), x)
                norm = cstar_norm(c, a, b, x)
                assert abs(cstar_norm(c, b, b, square) - norm ** 2) <= 1e-6 * (1 + norm ** 2)
                checked += 1


@pytest.mark.parametrize("seed", range(9000, 9050))
def test_dense_functoriality_and_naturality(seed):
    m1, m2 = gen_morphism_pair(dense_params(seed))
    composite = gamma_on_morphism(compose_morphisms(m1, m2))
    expected = compose_star_functors(gamma_on_morphism(m2), gamma_on_morphism(m1))
    for pair, m in composite.hom_maps.items():
        np.testing.assert_allclose(m, expected.hom_maps[pair], atol=1e-9)
    assert check_naturality_E(m1).passed, seed

    first, second = gen_functor_pair(dense_params(seed, ("unitary", "invertible")[seed % 2]))
    assert morphisms_equal(
        sigma_on_morphism(compose_star_functors(first, second)),
        compose_morphisms(sigma_on_morphism(second), sigma_on_morphism(first)),
    )
    assert check_naturality_G(first).passed, seed
