"""Finite non-full spaceoids and their morphisms.

A spaceoid is a groupoid of partial bijections between finite base sets,
with a rank-one Fell line bundle over it recorded as a unit-modulus
cocycle in one chosen unit frame per point:

* ``u_p ∘ u_q = c(p, q) · u_{p∘q}`` for composable points,
* ``(u_p)* = ν(p) · u_{p*}``.

Diagonal Hom-sets are implicit; the identity point over ``x ∈ X_A`` has
id ``"A:x"`` and unit fiber, so ``c`` and ``ν`` are 1 whenever an identity
is involved.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterator, Optional

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from .config import settings
from .exceptions import EndpointMismatch, HolonomyViolation, InvalidMorphism, InvalidSpaceoid
from .numlin import Tolerance
from .reports import ValidationReport

logger = logging.getLogger(__name__)

Pair = tuple[str, str]


def _phase_bound(tol: Optional[Tolerance]) -> float:
    return settings.MATCH_TOL if tol is None else tol.abs_eps


@dataclass(frozen=True)
class Point:
    id: str
    t: str
    s: str


def identity_id(a: str, x: str) -> str:
    return f"{a}:{x}"


def is_identity(pid: str) -> bool:
    return ":" in pid


# -------------------------------------------------
# Spaceoids
# -------------------------------------------------
@dataclass(frozen=True, eq=False)
class FiniteSpaceoid:
    objects: tuple[str, ...]
    base_sets: dict[str, tuple[str, ...]]
    points: dict[Pair, tuple[Point, ...]]
    phases: dict[tuple[str, str], complex] = field(default_factory=dict)
    nu: dict[str, complex] = field(default_factory=dict)
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def build(cls, objects, base_sets, points=None, phases=None, nu=None) -> "FiniteSpaceoid":
        objects = tuple(objects)
        base = {a: tuple(str(x) for x in base_sets.get(a, ())) for a in objects}
        points = points or {}
        full_points = {}
        for a, b in product(objects, repeat=2):
            if a != b:
                full_points[(a, b)] = tuple(Point(str(p.id), str(p.t), str(p.s)) for p in points.get((a, b), ()))
        stray = [k for k in points if k not in full_points]
        if stray:
            raise InvalidSpaceoid(f"points given for unknown or diagonal Hom-sets: {stray}", witness={"pairs": [list(k) for k in stray]})
        return cls(
            objects,
            base,
            full_points,
            {k: complex(v) for k, v in (phases or {}).items()},
            {k: complex(v) for k, v in (nu or {}).items()},
        )

    # --- lookups -------------------------------------------------------
    def _index(self) -> dict:
        if "index" not in self._memo:
            located, ends = {}, {}
            for (a, b), pts in self.points.items():
                for p in pts:
                    located.setdefault(p.id, (a, b, p))
                    ends.setdefault((a, b, p.t, p.s), p)
            by_target = defaultdict(dict)
            for (a, b), pts in self.points.items():
                for p in pts:
                    by_target[(a, b)].setdefault(p.t, p)
            self._memo["index"] = {"located": located, "ends": ends, "by_target": by_target}
        return self._memo["index"]

    def pairs(self, off_diagonal: bool = False) -> Iterator[Pair]:
        for a, b in product(self.objects, repeat=2):
            if not (off_diagonal and a == b):
                yield a, b

    def hom(self, a: str, b: str) -> tuple[Point, ...]:
        if a == b:
            return tuple(Point(identity_id(a, x), x, x) for x in self.base_sets[a])
        return self.points[(a, b)]

    def locate(self, pid: str) -> tuple[str, str, Point]:
        if is_identity(pid):
            a, x = pid.split(":", 1)
            return a, a, Point(pid, x, x)
        return self._index()["located"][pid]

    def find(self, a: str, b: str, t: str, s: str) -> Optional[Point]:
        if a == b:
            return Point(identity_id(a, t), t, t) if t == s and t in self.base_sets[a] else None
        return self._index()["ends"].get((a, b, t, s))

    def starting_at(self, a: str, b: str, t: str) -> Optional[Point]:
        """The point of X_AB with target t, if any."""
        if a == b:
            return self.find(a, a, t, t)
        return self._index()["by_target"][(a, b)].get(t)

    def star(self, pid: str) -> Optional[Point]:
        a, b, p = self.locate(pid)
        return self.find(b, a, p.s, p.t)

    def compose(self, a: str, b: str, c: str, p: Point, q: Point) -> Optional[Point]:
        if p.s != q.t:
            return None
        return self.find(a, c, p.t, q.s)

    def cocycle(self, p: Point, q: Point) -> complex:
        if is_identity(p.id) or is_identity(q.id):
            return 1.0 + 0.0j
        return self.phases.get((p.id, q.id), 1.0 + 0.0j)

    def nu_of(self, p: Point) -> complex:
        return 1.0 + 0.0j if is_identity(p.id) else self.nu.get(p.id, 1.0 + 0.0j)

    def composable(self) -> Iterator[tuple[str, str, str, Point, Point]]:
        """Every composable pair (p, q) of points, identities excluded."""
        for (a, b), pts in self.points.items():
            for p in pts:
                for c in self.objects:
                    if c == b:
                        continue
                    q = self.starting_at(b, c, p.s)
                    if q is not None:
                        yield a, b, c, p, q

    def point_count(self) -> int:
        return sum(len(pts) for pts in self.points.values())


def pair_components(s: FiniteSpaceoid) -> list[dict[str, str]]:
    """Maximal pair subgroupoids as {object: base point}, in first-seen order."""
    nodes = [(a, x) for a in s.objects for x in s.base_sets[a]]
    if not nodes:
        return []
    index = {node: i for i, node in enumerate(nodes)}
    rows, cols = [], []
    for (a, b), pts in s.points.items():
        for p in pts:
            if (a, p.t) in index and (b, p.s) in index:
                rows.append(index[(a, p.t)])
                cols.append(index[(b, p.s)])
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    _, labels = csgraph.connected_components(graph, directed=False)

    components: dict[int, dict[str, str]] = {}
    for (a, x), label in zip(nodes, labels):
        block = components.setdefault(int(label), {})
        if a in block:
            raise HolonomyViolation(
                f"base points {block[a]} and {x} of {a} lie in one pair subgroupoid",
                witness={"object": a, "base_points": [block[a], x]},
            )
        block[a] = x
    return list(components.values())


def validate_spaceoid(s: FiniteSpaceoid, tol: Optional[Tolerance] = None) -> ValidationReport:
    report = ValidationReport(subject="spaceoid")
    bound = _phase_bound(tol)

    report.record("structure")
    seen_ids = set()
    for a in s.objects:
        if len(set(s.base_sets[a])) != len(s.base_sets[a]):
            report.fail("structure", f"duplicate base labels in X_{a}", object=a)
        if not s.base_sets[a]:
            report.fail("structure", f"X_{a} is empty", object=a)
    for (a, b), pts in s.points.items():
        for p in pts:
            if is_identity(p.id) or p.id in seen_ids:
                report.fail("structure", f"point id {p.id!r} is reserved or repeated", point=p.id)
            seen_ids.add(p.id)
            if p.t not in s.base_sets[a] or p.s not in s.base_sets[b]:
                report.fail("structure", f"point {p.id} has ends outside X_{a} × X_{b}", point=p.id)
    for (pid, qid), value in s.phases.items():
        if pid not in seen_ids or qid not in seen_ids:
            report.fail("structure", f"phase on unknown points ({pid}, {qid})", points=[pid, qid])
        elif abs(abs(value) - 1.0) > bound:
            report.fail("cocycle", f"phase c({pid},{qid}) is not unit modulus", abs(abs(value) - 1.0), points=[pid, qid])
    for pid, value in s.nu.items():
        if pid not in seen_ids:
            report.fail("structure", f"ν on unknown point {pid}", point=pid)
        elif abs(abs(value) - 1.0) > bound:
            report.fail("cocycle", f"ν({pid}) is not unit modulus", abs(abs(value) - 1.0), point=pid)
    if not report.valid:
        return report

    report.record("injectivity")
    for (a, b), pts in s.points.items():
        for end in ("t", "s"):
            values = [getattr(p, end) for p in pts]
            if len(set(values)) != len(values):
                dup = next(v for v in values if values.count(v) > 1)
                report.fail("injectivity", f"{end} is not injective on X_{a}{b}", pair=[a, b], end=end, value=dup)

    report.record("inverse")
    for (a, b), pts in s.points.items():
        for p in pts:
            if s.find(b, a, p.s, p.t) is None:
                report.fail("inverse", f"X_{b}{a} has no inverse of {p.id}", point=p.id)

    report.record("closure")
    for a, b, c, p, q in s.composable():
        if s.compose(a, b, c, p, q) is None:
            report.fail("closure", f"{p.id}∘{q.id} has no point in X_{a}{c}", points=[p.id, q.id], pair=[a, c])

    report.record("holonomy")
    try:
        pair_components(s)
    except HolonomyViolation as exc:
        report.fail("holonomy", exc.detail, **exc.witness)

    if not report.valid:
        return report

    report.record("cocycle")
    for (a, b), pts in s.points.items():
        for p in pts:
            p_star = s.star(p.id)
            if abs(s.nu_of(p) - s.nu_of(p_star)) > bound:
                report.fail("cocycle", f"ν({p.id}) ≠ ν({p_star.id})", abs(s.nu_of(p) - s.nu_of(p_star)), point=p.id)
            deviation = abs(s.nu_of(p) * s.cocycle(p, p_star) - 1.0)
            if deviation > bound:
                report.fail("cocycle", f"u_p∘u_p* is not the unit over {p.t}", deviation, point=p.id)
    for a, b, c, p, q in s.composable():
        pq = s.compose(a, b, c, p, q)
        p_star, q_star = s.star(p.id), s.star(q.id)
        lhs = np.conj(s.cocycle(p, q)) * s.nu_of(pq)
        rhs = s.nu_of(p) * s.nu_of(q) * s.cocycle(q_star, p_star)
        if abs(lhs - rhs) > bound:
            report.fail("cocycle", f"(u_p∘u_q)* ≠ u_q*∘u_p* for ({p.id},{q.id})", abs(lhs - rhs), points=[p.id, q.id])
        for d in s.objects:
            if d == c:
                continue
            r = s.starting_at(c, d, q.s)
            if r is None:
                continue
            qr = s.compose(b, c, d, q, r)
            lhs = s.cocycle(p, q) * s.cocycle(pq, r)
            rhs = s.cocycle(q, r) * s.cocycle(p, qr)
            if abs(lhs - rhs) > bound:
                report.fail("cocycle", f"cocycle identity fails on ({p.id},{q.id},{r.id})", abs(lhs - rhs), points=[p.id, q.id, r.id])

    if report.valid:
        logger.debug("✅ spaceoid with %d points is valid", s.point_count())
    return report


def spaceoids_equal(s1: FiniteSpaceoid, s2: FiniteSpaceoid, tol: Optional[float] = None) -> bool:
    if s1 is s2:
        return True
    bound = settings.MATCH_TOL if tol is None else tol
    if s1.objects != s2.objects or s1.base_sets != s2.base_sets:
        return False
    if any(set(s1.points[k]) != set(s2.points[k]) for k in s1.points):
        return False
    for _, _, _, p, q in s1.composable():
        if abs(s1.cocycle(p, q) - s2.cocycle(p, q)) > bound:
            return False
    for pts in s1.points.values():
        for p in pts:
            if abs(s1.nu_of(p) - s2.nu_of(p)) > bound:
                return False
    return True


# -------------------------------------------------
# Gauge fixing
# -------------------------------------------------
def _snap(z: complex) -> complex:
    return 1.0 + 0.0j if abs(z - 1.0) <= settings.MATCH_TOL else complex(z)


def gauge_fix(s: FiniteSpaceoid) -> tuple[FiniteSpaceoid, dict[str, complex]]:
    """Re-frame every pair subgroupoid so that all cocycle values become 1.

    Returns the re-framed spaceoid and λ with u'_p = λ_p · u_p. A pair
    subgroupoid is complete on its objects, so the spanning tree is the star
    centred on its first object: the frames at the root are kept and every
    other frame is glued through the root.
    """
    if "gauge" in s._memo:
        return s._memo["gauge"]
    lam: dict[str, complex] = {}
    for block in pair_components(s):
        objs = list(block)
        if len(objs) < 2:
            continue
        point = {(a, b): s.find(a, b, block[a], block[b]) for a in objs for b in objs if a != b}
        root = objs[0]
        for a in objs[1:]:
            lam[point[(root, a)].id] = 1.0 + 0.0j
            lam[point[(a, root)].id] = s.nu_of(point[(root, a)])
        for a, b in product(objs[1:], repeat=2):
            if a != b:
                glue = s.cocycle(point[(a, root)], point[(root, b)])
                lam[point[(a, b)].id] = lam[point[(a, root)].id] * lam[point[(root, b)].id] * glue

    def lam_of(p: Point) -> complex:
        return 1.0 + 0.0j if is_identity(p.id) else lam.get(p.id, 1.0 + 0.0j)

    phases = {}
    for a, b, c, p, q in s.composable():
        pq = s.compose(a, b, c, p, q)
        value = _snap(lam_of(p) * lam_of(q) * s.cocycle(p, q) / lam_of(pq))
        if value != 1.0:
            phases[(p.id, q.id)] = value
    nu = {}
    for pts in s.points.values():
        for p in pts:
            value = _snap(np.conj(lam_of(p)) * s.nu_of(p) / lam_of(s.star(p.id)))
            if value != 1.0:
                nu[p.id] = value

    fixed = FiniteSpaceoid(s.objects, s.base_sets, s.points, phases, nu)
    if phases or nu:
        logger.warning("⚠️ gauge fixing left %d non-trivial phases; the cocycle is not a coboundary", len(phases) + len(nu))
    result = (fixed, {pid: complex(v) for pid, v in lam.items()})
    s._memo["gauge"] = result
    return result


# -------------------------------------------------
# Morphisms
# -------------------------------------------------
@dataclass(frozen=True, eq=False)
class SpaceoidMorphism:
    """A Takahashi morphism: base maps forward, fiber scalars backward.

    ``scalars[p]`` is F_p with F(u²_{f(p)}) = F_p · u¹_p.
    """
    source: FiniteSpaceoid
    target: FiniteSpaceoid
    obj_map: dict[str, str]
    base_map: dict[str, dict[str, str]]
    point_map: dict[str, str]
    scalars: dict[str, complex]

    def image(self, pid: str) -> str:
        if is_identity(pid):
            a, x = pid.split(":", 1)
            return identity_id(self.obj_map[a], self.base_map[a][x])
        return self.point_map[pid]

    def scalar(self, pid: str) -> complex:
        return 1.0 + 0.0j if is_identity(pid) else self.scalars.get(pid, 1.0 + 0.0j)


def derive_point_map(source: FiniteSpaceoid, target: FiniteSpaceoid, obj_map, base_map) -> dict[str, str]:
    """The point map forced by the object and base maps (points are determined by their ends)."""
    point_map = {}
    for (a, b), pts in source.points.items():
        for p in pts:
            q = target.find(obj_map[a], obj_map[b], base_map[a].get(p.t), base_map[b].get(p.s))
            if q is None:
                raise InvalidMorphism(f"point {p.id} has no image in the target", witness={"point": p.id})
            point_map[p.id] = q.id
    return point_map


def identity_morphism(s: FiniteSpaceoid) -> SpaceoidMorphism:
    return SpaceoidMorphism(
        s,
        s,
        {a: a for a in s.objects},
        {a: {x: x for x in s.base_sets[a]} for a in s.objects},
        {p.id: p.id for pts in s.points.values() for p in pts},
        {},
    )


def validate_morphism(m: SpaceoidMorphism, tol: Optional[Tolerance] = None) -> ValidationReport:
    src, dst = m.source, m.target
    report = ValidationReport(subject="spaceoid morphism")
    bound = _phase_bound(tol)

    report.record("object_bijective")
    if sorted(m.obj_map) != sorted(src.objects) or sorted(m.obj_map.values()) != sorted(dst.objects):
        report.fail("object_bijective", "object map is not a bijection", mapping=dict(m.obj_map))
        return report

    report.record("base_map")
    for a in src.objects:
        for x in src.base_sets[a]:
            image = m.base_map.get(a, {}).get(x)
            if image not in dst.base_sets[m.obj_map[a]]:
                report.fail("base_map", f"{a}:{x} has no image in X_{m.obj_map[a]}", object=a, base_point=x)
    if not report.valid:
        return report

    report.record("point_map")
    for (a, b), pts in src.points.items():
        for p in pts:
            qid = m.point_map.get(p.id)
            expected = dst.find(m.obj_map[a], m.obj_map[b], m.base_map[a][p.t], m.base_map[b][p.s])
            if expected is None or qid != expected.id:
                report.fail("point_map", f"{p.id} is not sent to the point over its image ends", point=p.id, image=qid)
    if not report.valid:
        return report

    # A pair subgroupoid must map onto every object of the one it lands in,
    # otherwise pulled-back sections are not multiplicative.
    report.record("block_cover")
    try:
        owner = {}
        target_blocks = pair_components(dst)
        for i, block in enumerate(target_blocks):
            for b, y in block.items():
                owner[(b, y)] = i
        for block in pair_components(src):
            a, x = next(iter(block.items()))
            covered = {m.obj_map[o] for o in block}
            landing = target_blocks[owner[(m.obj_map[a], m.base_map[a][x])]]
            if covered != set(landing):
                report.fail(
                    "block_cover",
                    f"pair subgroupoid over {sorted(block)} misses {sorted(set(landing) - covered)}",
                    block=dict(block),
                    image=dict(landing),
                )
    except HolonomyViolation as exc:
        report.fail("block_cover", exc.detail, **exc.witness)
    if not report.valid:
        return report

    report.record("fiber_unit_modulus")
    for pid, value in m.scalars.items():
        if abs(abs(value) - 1.0) > bound:
            report.fail("fiber_unit_modulus", f"|F_{pid}| ≠ 1", abs(abs(value) - 1.0), point=pid)

    report.record("fiber_functorial")
    for a, b, c, p, q in src.composable():
        pq = src.compose(a, b, c, p, q)
        fp, fq = dst.locate(m.image(p.id))[2], dst.locate(m.image(q.id))[2]
        lhs = m.scalar(pq.id) * dst.cocycle(fp, fq)
        rhs = m.scalar(p.id) * m.scalar(q.id) * src.cocycle(p, q)
        if abs(lhs - rhs) > bound:
            report.fail("fiber_functorial", f"F is not multiplicative on ({p.id},{q.id})", abs(lhs - rhs), points=[p.id, q.id])

    report.record("fiber_involutive")
    for pts in src.points.values():
        for p in pts:
            p_star = src.star(p.id)
            fp = dst.locate(m.image(p.id))[2]
            lhs = dst.nu_of(fp) * m.scalar(p_star.id)
            rhs = np.conj(m.scalar(p.id)) * src.nu_of(p)
            if abs(lhs - rhs) > bound:
                report.fail("fiber_involutive", f"F does not commute with * at {p.id}", abs(lhs - rhs), point=p.id)

    # Finite discrete bases: both conditions hold for every map.
    report.record("converging_at_infinity")
    report.record("vanishing_at_infinity")
    return report


def morphisms_equal(m1: SpaceoidMorphism, m2: SpaceoidMorphism, tol: Optional[float] = None) -> bool:
    bound = settings.MATCH_TOL if tol is None else tol
    if m1.obj_map != m2.obj_map or m1.base_map != m2.base_map or m1.point_map != m2.point_map:
        return False
    ids = set(m1.scalars) | set(m2.scalars)
    return all(abs(m1.scalar(pid) - m2.scalar(pid)) <= bound for pid in ids)


def compose_morphisms(fst: SpaceoidMorphism, snd: SpaceoidMorphism) -> SpaceoidMorphism:
    """The morphism E¹ → E³ obtained by following ``fst`` then ``snd``."""
    if not spaceoids_equal(fst.target, snd.source):
        raise EndpointMismatch("target of the first morphism is not the source of the second")
    src = fst.source
    obj_map = {a: snd.obj_map[fst.obj_map[a]] for a in src.objects}
    base_map = {
        a: {x: snd.base_map[fst.obj_map[a]][fst.base_map[a][x]] for x in src.base_sets[a]}
        for a in src.objects
    }
    point_map, scalars = {}, {}
    for pts in src.points.values():
        for p in pts:
            middle = fst.point_map[p.id]
            point_map[p.id] = snd.point_map[middle]
            scalars[p.id] = fst.scalar(p.id) * snd.scalar(middle)
    return SpaceoidMorphism(src, snd.target, obj_map, base_map, point_map, scalars)


def invert_morphism(m: SpaceoidMorphism) -> SpaceoidMorphism:
    inverse_objects = {b: a for a, b in m.obj_map.items()}
    inverse_base = {}
    for a in m.source.objects:
        forward = m.base_map[a]
        if len(set(forward.values())) != len(forward) or len(forward) != len(m.target.base_sets[m.obj_map[a]]):
            raise InvalidMorphism(f"base map on {a} is not a bijection", witness={"object": a})
        inverse_base[m.obj_map[a]] = {y: x for x, y in forward.items()}
    if len(set(m.point_map.values())) != len(m.point_map) or len(m.point_map) != m.target.point_count():
        raise InvalidMorphism("point map is not a bijection")
    inverse_points = {q: p for p, q in m.point_map.items()}
    scalars = {q: 1.0 / m.scalar(p) for p, q in m.point_map.items()}
    return SpaceoidMorphism(m.target, m.source, inverse_objects, inverse_base, inverse_points, scalars)


def check_inverse_pair(m: SpaceoidMorphism, inverse: SpaceoidMorphism) -> bool:
    return morphisms_equal(compose_morphisms(m, inverse), identity_morphism(m.source)) and morphisms_equal(
        compose_morphisms(inverse, m), identity_morphism(m.target)
    )


# -------------------------------------------------
# Isomorphism search
# -------------------------------------------------
def spaceoids_isomorphic(s1: FiniteSpaceoid, s2: FiniteSpaceoid, tol=None) -> Optional[SpaceoidMorphism]:
    """An invertible morphism s1 → s2, or None.

    Only object bijections branch: once objects are matched, the pair
    subgroupoids pair off by their object sets and the fiber scalars are
    read from the two gauge fixings.
    """
    if len(s1.objects) != len(s2.objects):
        return None
    if len(s1.objects) > settings.MAX_OBJECTS:
        raise InvalidSpaceoid(f"isomorphism search is capped at {settings.MAX_OBJECTS} objects")
    if s1.point_count() != s2.point_count():
        return None
    if sorted(len(v) for v in s1.base_sets.values()) != sorted(len(v) for v in s2.base_sets.values()):
        return None

    blocks1, blocks2 = pair_components(s1), pair_components(s2)
    _, lam1 = gauge_fix(s1)
    _, lam2 = gauge_fix(s2)
    signature2 = sorted(tuple(sorted(block)) for block in blocks2)

    for image in permutations(s2.objects):
        g = dict(zip(s1.objects, image))
        if any(len(s1.base_sets[a]) != len(s2.base_sets[g[a]]) for a in s1.objects):
            continue
        if any(len(s1.points[(a, b)]) != len(s2.points[(g[a], g[b])]) for a, b in s1.pairs(off_diagonal=True)):
            continue
        if sorted(tuple(sorted(g[a] for a in block)) for block in blocks1) != signature2:
            continue

        pools = defaultdict(list)
        for block in blocks2:
            pools[frozenset(block)].append(block)
        base_map: dict[str, dict[str, str]] = {a: {} for a in s1.objects}
        for block in blocks1:
            partner = pools[frozenset(g[a] for a in block)].pop(0)
            for a, x in block.items():
                base_map[a][x] = partner[g[a]]

        point_map = derive_point_map(s1, s2, g, base_map)
        scalars = {pid: lam1.get(pid, 1.0) / lam2.get(qid, 1.0) for pid, qid in point_map.items()}
        candidate = SpaceoidMorphism(s1, s2, g, base_map, point_map, scalars)
        if not validate_morphism(candidate).valid:
            continue
        if check_inverse_pair(candidate, invert_morphism(candidate)):
            return candidate
    return None
