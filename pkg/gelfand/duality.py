"""Natural isomorphisms of the duality and the bimodule spectral theorem.

Every isomorphism verdict here is constructive: an explicit inverse is built
and both composites are compared with identities.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import settings
from .cstarcat import (
    FiniteCStarCategory,
    HilbertBimodule,
    StarFunctor,
    check_star_functor,
    compose_star_functors,
    cstar_norm,
    invert_star_functor,
    linked_pairs,
    linking_category,
    validate_category,
)
from .exceptions import InvalidCategory, InvalidFunctor, InvalidSpaceoid, NumlinError
from .functors import gamma_on_morphism, sections_category, sigma_on_morphism, spectral_spaceoid
from .numlin import Tolerance, max_abs, numeric_rank
from .reports import HomSetCheck, IsomorphismReport, NaturalityReport, NaturalityWitness
from .spaceoid import (
    FiniteSpaceoid,
    SpaceoidMorphism,
    check_inverse_pair,
    compose_morphisms,
    derive_point_map,
    invert_morphism,
    validate_morphism,
    validate_spaceoid,
)

logger = logging.getLogger(__name__)


# -------------------------------------------------
# Gel'fand transform: C → Γ(Σ(C))
# -------------------------------------------------
def gelfand_transform(c: FiniteCStarCategory, tol: Optional[Tolerance] = None) -> StarFunctor:
    tol = Tolerance.coerce(tol)
    report = validate_category(c, tol)
    if not report.valid:
        raise InvalidCategory("category fails its axioms", witness=[f.model_dump() for f in report.failures])
    s, data = spectral_spaceoid(c, tol)
    target = sections_category(s)
    hom_maps = {pair: data.transforms[pair] for pair in c.pairs()}
    return StarFunctor(c, target, {a: a for a in c.objects}, hom_maps)


def _max_identity_deviation(functor: StarFunctor) -> float:
    return max(
        (max_abs(m - np.eye(m.shape[0])) for m in functor.hom_maps.values() if m.size),
        default=0.0,
    )


def verify_gelfand_isomorphism(c: FiniteCStarCategory, tol: Optional[Tolerance] = None) -> IsomorphismReport:
    """Rank, isometry and an explicit two-sided inverse for the Gel'fand transform."""
    tol = Tolerance.coerce(tol)
    transform = gelfand_transform(c, tol)
    report = IsomorphismReport(subject="gelfand transform", threshold=settings.MATCH_TOL)

    functor_report = check_star_functor(transform, tol)
    report.notes.extend(f"{f.axiom}: {f.detail}" for f in functor_report.failures)

    for a, b in c.pairs():
        m = transform.hom_maps[(a, b)]
        dim = c.dim(a, b)
        if m.shape != (dim, dim):
            report.notes.append(f"Hom-set {a}|{b}: {m.shape[0]} points for dimension {dim}")
        rank = numeric_rank(m, tol) if m.size else 0
        deviation = 0.0
        for k in range(dim):
            x = np.eye(dim, dtype=complex)[:, k]
            norm_x = cstar_norm(c, a, b, x, tol)
            # sections of a line bundle: the C*-norm is the sup of |x̂|
            norm_hat = max_abs(m @ x)
            deviation = max(deviation, abs(norm_hat - norm_x) / (1.0 + norm_x))
        report.hom_sets.append(HomSetCheck(source=a, target=b, dim=dim, rank=rank, isometry_deviation=deviation))

    if report.bijective and not report.notes:
        try:
            inverse = invert_star_functor(transform, tol)
        except (InvalidFunctor, NumlinError, np.linalg.LinAlgError) as exc:
            report.notes.append(f"no inverse: {exc}")
        else:
            there_and_back = compose_star_functors(transform, inverse)
            back_and_there = compose_star_functors(inverse, transform)
            report.inverse_deviation = max(_max_identity_deviation(there_and_back), _max_identity_deviation(back_and_there))
            inverse_report = check_star_functor(inverse, tol)
            report.notes.extend(f"inverse {f.axiom}: {f.detail}" for f in inverse_report.failures)

    if report.passed:
        logger.debug("✅ Gel'fand transform is an isometric *-isomorphism")
    else:
        logger.info("❌ Gel'fand transform check failed: %s", report.notes or report.summary())
    return report


# -------------------------------------------------
# Evaluation transform: S → Σ(Γ(S))
# -------------------------------------------------
def evaluation_transform(s: FiniteSpaceoid, tol: Optional[Tolerance] = None) -> SpaceoidMorphism:
    """ev: S → Σ(Γ(S)), each base point to its evaluation character."""
    tol = Tolerance.coerce(tol)
    report = validate_spaceoid(s)
    if not report.valid:
        raise InvalidSpaceoid("spaceoid fails its axioms", witness=[f.model_dump() for f in report.failures])
    c = sections_category(s)
    spectrum, data = spectral_spaceoid(c, tol)

    base_map = {}
    for a in s.objects:
        characters = data.transforms[(a, a)]
        mapping = {}
        for i, x in enumerate(s.base_sets[a]):
            # ev_x is the character whose row is the coordinate vector of x
            p = int(np.argmax(np.abs(characters[:, i])))
            mapping[x] = data.point_ids[(a, a)][p].split(":", 1)[1]
        base_map[a] = mapping

    point_map = derive_point_map(s, spectrum, {a: a for a in s.objects}, base_map)
    frame = linked_pairs(c, tol)
    scalars = {}
    for (a, b), pts in s.points.items():
        for i, p in enumerate(pts):
            image = spectrum.locate(point_map[p.id])[2]
            # the corner unit vector is a phase times δ_p; that phase is Ω_p
            scalars[p.id] = complex(frame.unit_vector(a, b, (int(image.t), int(image.s)))[i])
    return SpaceoidMorphism(s, spectrum, {a: a for a in s.objects}, base_map, point_map, scalars)


def verify_evaluation_isomorphism(s: FiniteSpaceoid, tol: Optional[Tolerance] = None) -> IsomorphismReport:
    tol = Tolerance.coerce(tol)
    ev = evaluation_transform(s, tol)
    report = IsomorphismReport(subject="evaluation transform", threshold=settings.MATCH_TOL)
    morphism_report = validate_morphism(ev)
    report.notes.extend(f"{f.axiom}: {f.detail}" for f in morphism_report.failures)
    for a, b in s.pairs():
        images = {ev.image(p.id) for p in s.hom(a, b)}
        count = len(ev.target.hom(a, b))
        deviation = max((abs(abs(ev.scalar(p.id)) - 1.0) for p in s.hom(a, b)), default=0.0)
        report.hom_sets.append(HomSetCheck(source=a, target=b, dim=count, rank=len(images), isometry_deviation=deviation))
    if report.bijective and not report.notes:
        if not check_inverse_pair(ev, invert_morphism(ev)):
            report.notes.append("inverse does not compose to the identity")
    return report


# -------------------------------------------------
# Naturality squares
# -------------------------------------------------
def check_naturality_G(functor: StarFunctor, tol: Optional[Tolerance] = None) -> NaturalityReport:
    """Γ_{Σ_Φ}∘𝔊_{C¹} against 𝔊_{C²}∘Φ on every basis element of C¹."""
    tol = Tolerance.coerce(tol)
    c1, c2 = functor.source, functor.target
    sigma = sigma_on_morphism(functor, tol)
    gamma = gamma_on_morphism(sigma)
    g1, g2 = gelfand_transform(c1, tol), gelfand_transform(c2, tol)
    threshold = settings.MATCH_TOL * (1.0 + max(c1.scale(), c2.scale()))
    report = NaturalityReport(square="gelfand", threshold=threshold)

    if gamma.obj_map != functor.obj_map:
        report.structural_mismatches.append(f"object maps differ: {gamma.obj_map} vs {functor.obj_map}")
        return report
    for a, b in c1.pairs():
        dim = c1.dim(a, b)
        if not dim:
            continue
        lhs = gamma.hom_maps[(a, b)] @ g1.hom_maps[(a, b)]
        rhs = g2.hom_maps[functor.target_pair(a, b)] @ functor.hom_maps[(a, b)]
        if lhs.shape != rhs.shape:
            report.structural_mismatches.append(f"Hom-set {a}|{b}: shapes {lhs.shape} and {rhs.shape}")
            continue
        # columns are the images of basis elements; the section norm is the sup
        deviations = np.max(np.abs(lhs - rhs), axis=0) if lhs.size else np.zeros(dim)
        k = int(np.argmax(deviations))
        report.witnesses.append(NaturalityWitness(location=f"{a}|{b}[{k}]", deviation=float(deviations[k])))
        report.square_identity = max(report.square_identity, float(deviations[k]))
    return report


def check_naturality_E(m: SpaceoidMorphism, tol: Optional[Tolerance] = None) -> NaturalityReport:
    """Σ_{Γ_m}∘𝔈_{E¹} against 𝔈_{E²}∘m, point by point and scalar by scalar."""
    tol = Tolerance.coerce(tol)
    ev1, ev2 = evaluation_transform(m.source, tol), evaluation_transform(m.target, tol)
    lower = compose_morphisms(ev1, sigma_on_morphism(gamma_on_morphism(m), tol))
    upper = compose_morphisms(m, ev2)
    report = NaturalityReport(square="evaluation", threshold=settings.MATCH_TOL)

    if lower.obj_map != upper.obj_map:
        report.structural_mismatches.append("object maps differ")
    if lower.base_map != upper.base_map:
        report.structural_mismatches.append("base maps differ")
    for pid in upper.point_map:
        if lower.point_map.get(pid) != upper.point_map[pid]:
            report.structural_mismatches.append(f"point {pid}: {lower.point_map.get(pid)} vs {upper.point_map[pid]}")
            continue
        deviation = abs(lower.scalar(pid) - upper.scalar(pid))
        report.witnesses.append(NaturalityWitness(location=pid, deviation=deviation))
        report.square_identity = max(report.square_identity, deviation)
    return report


# -------------------------------------------------
# Hilbert bimodules
# -------------------------------------------------
@dataclass(frozen=True, eq=False)
class BimoduleSpectrum:
    """Spectral picture of a Hilbert bimodule over two commutative algebras.

    ``partial_bijection`` lists (character of algA, character of algB)
    pairs; ``iso`` maps module coordinates to section values, one row per
    pair, and ``frames`` holds the corner unit vectors in module
    coordinates.
    """
    partial_bijection: list[tuple[int, int]]
    phases: dict[tuple[str, str], complex]
    nu: dict[str, complex]
    frames: np.ndarray
    iso: np.ndarray
    spectrum_a: int
    spectrum_b: int

    @property
    def left_support(self) -> set[int]:
        return {p for p, _ in self.partial_bijection}

    @property
    def right_support(self) -> set[int]:
        return {q for _, q in self.partial_bijection}

    @property
    def full_left(self) -> bool:
        return self.left_support == set(range(self.spectrum_a))

    @property
    def full_right(self) -> bool:
        return self.right_support == set(range(self.spectrum_b))

    def summary(self, labels_a=None, labels_b=None) -> dict:
        name_a = (lambda p: labels_a[p]) if labels_a else str
        name_b = (lambda q: labels_b[q]) if labels_b else str
        return {
            "partial_bijection": [[name_a(p), name_b(q)] for p, q in self.partial_bijection],
            "left_support": sorted(name_a(p) for p in self.left_support),
            "right_support": sorted(name_b(q) for q in self.right_support),
            "full_left": self.full_left,
            "full_right": self.full_right,
        }


def bimodule_spectrum(m: HilbertBimodule, tol: Optional[Tolerance] = None) -> BimoduleSpectrum:
    """The partial bijection between the spectra of algA and algB carried by M."""
    tol = Tolerance.coerce(tol)
    linked = linking_category(m, tol)
    s, data = spectral_spaceoid(linked, tol)
    frame = linked_pairs(linked, tol)
    pairs = [(int(p.t), int(p.s)) for p in s.hom("A", "B")]
    units = np.array([frame.unit_vector("A", "B", pair) for pair in pairs], dtype=complex).reshape(len(pairs), m.module_dim)
    logger.info(
        "🔄 bimodule spectrum: %d of %d × %d character pairs linked",
        len(pairs), len(s.base_sets["A"]), len(s.base_sets["B"]),
    )
    return BimoduleSpectrum(
        partial_bijection=pairs,
        phases=dict(s.phases),
        nu=dict(s.nu),
        frames=units,
        iso=data.transforms[("A", "B")],
        spectrum_a=len(s.base_sets["A"]),
        spectrum_b=len(s.base_sets["B"]),
    )


def verify_bimodule_isomorphism(
    m: HilbertBimodule, spectrum: BimoduleSpectrum, tol: Optional[Tolerance] = None
) -> IsomorphismReport:
    """M → sections must be bijective and carry both inner products to pointwise products."""
    tol = Tolerance.coerce(tol)
    frame = linked_pairs(linking_category(m, tol), tol)
    u = spectrum.iso
    dm = m.module_dim
    report = IsomorphismReport(subject="bimodule", threshold=tol.abs_eps)

    if u.shape != (dm, dm):
        report.notes.append(f"{u.shape[0]} linked pairs for a module of dimension {dm}")
    rank = numeric_rank(u, tol) if u.size else 0

    deviation = 0.0
    if dm and u.shape[0]:
        at_target = np.zeros((u.shape[0], spectrum.spectrum_a))
        at_source = np.zeros((u.shape[0], spectrum.spectrum_b))
        for k, (p, q) in enumerate(spectrum.partial_bijection):
            at_target[k, p] = 1.0
            at_source[k, q] = 1.0
        expected_a = np.einsum("km,kn,kp->mnp", u, u.conj(), at_target)
        actual_a = np.einsum("mnk,pk->mnp", m.ip_a, frame.characters["A"])
        expected_b = np.einsum("km,kn,kq->mnq", u.conj(), u, at_source)
        actual_b = np.einsum("mnk,qk->mnq", m.ip_b, frame.characters["B"])
        deviation = max(max_abs(expected_a - actual_a), max_abs(expected_b - actual_b))
    report.hom_sets.append(HomSetCheck(source="A", target="B", dim=dm, rank=rank, isometry_deviation=deviation))

    if report.bijective and not report.notes and dm:
        inverse = np.linalg.solve(u, np.eye(dm))
        report.inverse_deviation = max(max_abs(inverse @ u - np.eye(dm)), max_abs(u @ inverse - np.eye(dm)))
    return report
