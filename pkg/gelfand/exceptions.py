"""Error hierarchy shared by the library and the CLI.

Every error carries a human readable ``detail`` and an optional structured
``witness``; the class attribute ``exit_code`` is what the CLI returns when
the error escapes a command.
"""

from typing import Any


class GelfandError(Exception):
    exit_code: int = 2

    def __init__(self, detail: str, *, witness: Any = None):
        super().__init__(detail)
        self.detail = detail
        self.witness = witness

    def to_dict(self) -> dict:
        payload = {"error": type(self).__name__, "detail": self.detail}
        if self.witness is not None:
            payload["witness"] = self.witness
        return payload


# -------------------------------------------------
# Linear algebra
# -------------------------------------------------
class NumlinError(GelfandError):
    """Raised by the dense linear algebra kernels."""


class NotSquare(NumlinError):
    pass


class NotHermitian(NumlinError):
    pass


class NoConvergence(NumlinError):
    pass


class NotCommuting(NumlinError):
    pass


class NotNormal(NumlinError):
    pass


# -------------------------------------------------
# C*-categories
# -------------------------------------------------
class DiagonalNotSemisimple(GelfandError):
    """A diagonal algebra could not be jointly diagonalized."""


class CornerDimensionExceedsOne(GelfandError):
    pass


class HolonomyViolation(GelfandError):
    pass


class BimoduleAxiomViolation(GelfandError):
    pass


class InvalidCategory(GelfandError):
    pass


class InvalidFunctor(GelfandError):
    pass


class DegenerateFunctor(GelfandError):
    """The non-degeneracy gate failed; the spectrum functor cannot act."""

    exit_code = 3


# -------------------------------------------------
# Spaceoids
# -------------------------------------------------
class InvalidSpaceoid(GelfandError):
    pass


class InvalidMorphism(GelfandError):
    pass


class EndpointMismatch(GelfandError):
    pass


# -------------------------------------------------
# Documents / I/O
# -------------------------------------------------
class DocumentError(GelfandError):
    """Malformed JSON or a schema violation in an input document."""

    exit_code = 1
