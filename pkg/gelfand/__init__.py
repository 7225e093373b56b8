"""Finite Gel'fand duality for commutative C*-categories and spaceoids."""

from .cstarcat import (
    FiniteCStarCategory,
    HilbertBimodule,
    StarFunctor,
    characters_of_diagonal,
    check_non_degenerate,
    check_star_functor,
    corner,
    enumerate_orbit_classes,
    linking_category,
    validate_category,
)
from .duality import (
    bimodule_spectrum,
    check_naturality_E,
    check_naturality_G,
    evaluation_transform,
    gelfand_transform,
    verify_bimodule_isomorphism,
    verify_gelfand_isomorphism,
)
from .exceptions import GelfandError
from .functors import gamma_on_morphism, sections_category, sigma_on_morphism, spectral_spaceoid
from .numlin import Tolerance
from .spaceoid import (
    FiniteSpaceoid,
    SpaceoidMorphism,
    compose_morphisms,
    gauge_fix,
    spaceoids_isomorphic,
    validate_spaceoid,
)

__version__ = "0.1.0"
