"""The two functors of the duality.

``sections_category`` (Γ) turns a spaceoid into the category of its
sections; ``spectral_spaceoid`` (Σ) recovers a spaceoid from the corners of
a commutative C*-category. Both are contravariant on morphisms and both
memoise their result on the input value so that composites built from
repeated calls see identical frames.
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .config import settings
from .cstarcat import (
    FiniteCStarCategory,
    StarFunctor,
    check_non_degenerate,
    check_star_functor,
    linked_pairs,
)
from .exceptions import DegenerateFunctor, InvalidFunctor, InvalidMorphism, InvalidSpaceoid
from .numlin import Tolerance, max_abs
from .spaceoid import FiniteSpaceoid, Point, SpaceoidMorphism, validate_morphism, validate_spaceoid

logger = logging.getLogger(__name__)

Pair = tuple[str, str]


@dataclass(frozen=True, eq=False)
class GelfandData:
    """Gel'fand transforms x ↦ x̂ for every Hom-set.

    ``transforms[(A, B)]`` has one row per point of X_AB (in the order of
    ``point_ids``); row i is the covector reading x̂ at that point.
    """
    point_ids: dict[Pair, tuple[str, ...]]
    transforms: dict[Pair, np.ndarray]

    def section(self, a: str, b: str, x) -> dict[str, complex]:
        values = self.transforms[(a, b)] @ np.asarray(x, dtype=complex)
        return {pid: complex(v) for pid, v in zip(self.point_ids[(a, b)], values)}

    def support(self, a: str, b: str, x, tol: Optional[float] = None) -> set[str]:
        bound = settings.MATCH_TOL if tol is None else tol
        return {pid for pid, v in self.section(a, b, x).items() if abs(v) > bound}


def base_label(p: int) -> str:
    return str(p)


def spectral_point_id(a: str, p: int, b: str, q: int) -> str:
    return f"{a}#{p}>{b}#{q}"


# -------------------------------------------------
# Γ: sections
# -------------------------------------------------
def sections_category(s: FiniteSpaceoid, validate: bool = True) -> FiniteCStarCategory:
    """Γ(S): one generator δ_p per point, composition and involution from the cocycle.

    ``validate=False`` skips the spaceoid axioms; the result is then only
    as good as its input and is not memoised.
    """
    if "sections" in s._memo:
        return s._memo["sections"]
    report = validate_spaceoid(s) if validate else None
    if report is not None and not report.valid:
        raise InvalidSpaceoid("spaceoid fails its axioms", witness=[f.model_dump() for f in report.failures])

    homs = {pair: s.hom(*pair) for pair in s.pairs()}
    index = {pair: {p.id: i for i, p in enumerate(pts)} for pair, pts in homs.items()}
    dims = {pair: len(pts) for pair, pts in homs.items()}

    comp = {}
    for a, b, c in product(s.objects, repeat=3):
        t = np.zeros((dims[(a, b)], dims[(b, c)], dims[(a, c)]), dtype=complex)
        for i, p in enumerate(homs[(a, b)]):
            for j, q in enumerate(homs[(b, c)]):
                r = s.compose(a, b, c, p, q)
                # zero extension: non-composable or no composite point
                if r is not None:
                    t[i, j, index[(a, c)][r.id]] = s.cocycle(p, q)
        comp[(a, b, c)] = t

    invol = {}
    for a, b in s.pairs():
        j = np.zeros((dims[(b, a)], dims[(a, b)]), dtype=complex)
        for i, p in enumerate(homs[(a, b)]):
            j[index[(b, a)][s.star(p.id).id], i] = s.nu_of(p)
        invol[(a, b)] = j

    unit = {a: np.ones(dims[(a, a)], dtype=complex) for a in s.objects}
    category = FiniteCStarCategory.build(s.objects, dims, comp, invol, unit)
    if validate:
        s._memo["sections"] = category
    return category


def gamma_on_morphism(m: SpaceoidMorphism) -> StarFunctor:
    """Γ_(f,F): Γ(E²) → Γ(E¹), pulling δ_q back to Σ_{f(p)=q} F_p·δ_p."""
    report = validate_morphism(m)
    if not report.valid:
        raise InvalidMorphism("morphism fails its axioms", witness=[f.model_dump() for f in report.failures])
    src, dst = sections_category(m.target), sections_category(m.source)
    back = {b: a for a, b in m.obj_map.items()}

    hom_maps = {}
    for a2, b2 in m.target.pairs():
        a1, b1 = back[a2], back[b2]
        column = {q.id: k for k, q in enumerate(m.target.hom(a2, b2))}
        mat = np.zeros((dst.dim(a1, b1), src.dim(a2, b2)), dtype=complex)
        for i, p in enumerate(m.source.hom(a1, b1)):
            mat[i, column[m.image(p.id)]] = m.scalar(p.id)
        hom_maps[(a2, b2)] = mat
    return StarFunctor(src, dst, back, hom_maps)


# -------------------------------------------------
# Σ: spectrum
# -------------------------------------------------
def spectral_spaceoid(c: FiniteCStarCategory, tol: Optional[Tolerance] = None) -> tuple[FiniteSpaceoid, GelfandData]:
    """Σ(C) with its Gel'fand data.

    Base points are the characters of the diagonals; X_AB holds the pairs
    of characters with a nonzero corner. Phases are read off by composing
    and taking adjoints of the corner unit vectors.
    """
    tol = Tolerance.coerce(tol)
    key = ("spectrum", tol)
    if key in c._memo:
        return c._memo[key]
    frame = linked_pairs(c, tol)

    base_sets = {a: tuple(base_label(p) for p in range(frame.characters[a].shape[0])) for a in c.objects}
    points: dict[Pair, tuple[Point, ...]] = {}
    for a, b in c.pairs(off_diagonal=True):
        points[(a, b)] = tuple(
            Point(spectral_point_id(a, p, b, q), base_label(p), base_label(q)) for p, q in frame.linked(a, b)
        )
    s = FiniteSpaceoid.build(c.objects, base_sets, points)

    def corner_of(point: Point) -> tuple[int, int]:
        return int(point.t), int(point.s)

    phases = {}
    for a, b, d, p, q in s.composable():
        r = s.compose(a, b, d, p, q)
        if r is None:
            continue
        glued = c.compose(a, b, d, frame.unit_vector(a, b, corner_of(p)), frame.unit_vector(b, d, corner_of(q)))
        phases[(p.id, q.id)] = frame.coefficient(a, d, corner_of(r), glued)
    nu = {}
    for (a, b), pts in points.items():
        for p in pts:
            adjoint = c.adjoint(a, b, frame.unit_vector(a, b, corner_of(p)))
            nu[p.id] = frame.coefficient(b, a, corner_of(s.star(p.id)), adjoint)
    s = FiniteSpaceoid(s.objects, s.base_sets, s.points, phases, nu)

    point_ids, transforms = {}, {}
    for a, b in c.pairs():
        hom = s.hom(a, b)
        point_ids[(a, b)] = tuple(p.id for p in hom)
        if a == b:
            transforms[(a, b)] = frame.characters[a].copy()
        else:
            rows = [frame.corners[(a, b)][corner_of(p)].covector for p in hom]
            transforms[(a, b)] = np.array(rows, dtype=complex).reshape(len(hom), c.dim(a, b))
    data = GelfandData(point_ids, transforms)

    result = (s, data)
    c._memo[key] = result
    logger.debug("✅ spectral spaceoid: %d base points, %d points", sum(map(len, base_sets.values())), s.point_count())
    return result


def _match_character(row: np.ndarray, characters: np.ndarray) -> Optional[int]:
    if not characters.size:
        return None
    deviations = np.max(np.abs(characters - row[None, :]), axis=1)
    best = int(np.argmin(deviations))
    return best if deviations[best] <= settings.MATCH_TOL * (1.0 + max_abs(row)) else None


def sigma_on_morphism(functor: StarFunctor, tol: Optional[Tolerance] = None) -> SpaceoidMorphism:
    """Σ_Φ: Σ(C²) → Σ(C¹), sending each point to its pulled-back character pair."""
    tol = Tolerance.coerce(tol)
    report = check_star_functor(functor, tol)
    if not report.valid:
        raise InvalidFunctor("not a *-functor", witness=[f.model_dump() for f in report.failures])
    gate = check_non_degenerate(functor, tol)
    if not gate:
        raise DegenerateFunctor(
            "functor pulls a point of the target spectrum back to zero",
            witness=gate.witness.model_dump() if gate.witness else None,
        )

    c1, c2 = functor.source, functor.target
    s1, _ = spectral_spaceoid(c1, tol)
    s2, _ = spectral_spaceoid(c2, tol)
    frame1, frame2 = linked_pairs(c1, tol), linked_pairs(c2, tol)
    back = {b: a for a, b in functor.obj_map.items()}

    base_map: dict[str, dict[str, str]] = {}
    for a2 in c2.objects:
        a1 = back[a2]
        mapping = {}
        for p, row in enumerate(frame2.characters[a2]):
            pulled = row @ functor.hom_maps[(a1, a1)]
            match = _match_character(pulled, frame1.characters[a1])
            if match is None:
                raise InvalidFunctor(f"character {p} of {a2} does not pull back to a character of {a1}", witness={"object": a2, "character": p})
            mapping[base_label(p)] = base_label(match)
        base_map[a2] = mapping

    point_map, scalars = {}, {}
    for (a2, b2), pts in s2.points.items():
        a1, b1 = back[a2], back[b2]
        for point in pts:
            image = s1.find(a1, b1, base_map[a2][point.t], base_map[b2][point.s])
            if image is None:
                raise DegenerateFunctor(f"point {point.id} has no image in the source spectrum", witness={"point": point.id})
            point_map[point.id] = image.id
            pushed = functor.apply(a1, b1, frame1.unit_vector(a1, b1, (int(image.t), int(image.s))))
            scalars[point.id] = frame2.coefficient(a2, b2, (int(point.t), int(point.s)), pushed)

    return SpaceoidMorphism(s2, s1, back, base_map, point_map, scalars)
