from typing import Any, List, Optional

from pydantic import BaseModel, Field


# -------------------------------------------------
# Validation
# -------------------------------------------------
class AxiomFailure(BaseModel):
    """One failed axiom, with the basis indices (or points) that witness it."""
    axiom: str
    detail: str = ""
    witness: dict[str, Any] = Field(default_factory=dict)
    deviation: Optional[float] = None


class ValidationReport(BaseModel):
    subject: str
    checks: List[str] = Field(default_factory=list)
    failures: List[AxiomFailure] = Field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failures

    def record(self, check: str) -> None:
        if check not in self.checks:
            self.checks.append(check)

    def fail(self, axiom: str, detail: str = "", deviation: Optional[float] = None, **witness: Any) -> None:
        self.record(axiom)
        self.failures.append(
            AxiomFailure(axiom=axiom, detail=detail, witness=witness, deviation=deviation)
        )

    def failed_axioms(self) -> set[str]:
        return {f.axiom for f in self.failures}

    def summary(self) -> dict:
        return {"valid": self.valid, **self.model_dump()}


# -------------------------------------------------
# Duality checks
# -------------------------------------------------
class NaturalityWitness(BaseModel):
    location: str
    deviation: float = Field(ge=0.0)


class NaturalityReport(BaseModel):
    square: str
    square_identity: float = Field(default=0.0, ge=0.0)
    threshold: float
    witnesses: List[NaturalityWitness] = Field(default_factory=list)
    structural_mismatches: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.structural_mismatches and self.square_identity <= self.threshold

    def summary(self) -> dict:
        return {"passed": self.passed, **self.model_dump()}


class HomSetCheck(BaseModel):
    source: str
    target: str
    dim: int
    rank: int
    isometry_deviation: float = Field(ge=0.0)


class IsomorphismReport(BaseModel):
    """Outcome of a constructive isomorphism verdict."""
    subject: str
    threshold: float
    hom_sets: List[HomSetCheck] = Field(default_factory=list)
    inverse_deviation: float = 0.0
    notes: List[str] = Field(default_factory=list)

    @property
    def bijective(self) -> bool:
        return all(h.rank == h.dim for h in self.hom_sets)

    @property
    def max_isometry_deviation(self) -> float:
        return max((h.isometry_deviation for h in self.hom_sets), default=0.0)

    @property
    def passed(self) -> bool:
        return (
            not self.notes
            and self.bijective
            and self.max_isometry_deviation <= self.threshold
            and self.inverse_deviation <= self.threshold
        )

    def summary(self) -> dict:
        return {
            "passed": self.passed,
            "bijective": self.bijective,
            "max_isometry_deviation": self.max_isometry_deviation,
            **self.model_dump(),
        }


class DegeneracyWitness(BaseModel):
    source_pair: tuple[str, str]
    target_pair: tuple[str, str]
    point: tuple[int, int]
    orbit_class: dict[str, Any] = Field(default_factory=dict)


class NonDegeneracyResult(BaseModel):
    non_degenerate: bool
    witness: Optional[DegeneracyWitness] = None

    def __bool__(self) -> bool:
        return self.non_degenerate
