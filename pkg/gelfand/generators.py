"""Seeded random instances with built-in oracles.

Every generator draws from ``numpy.random.Generator(PCG64(seed))`` in a
fixed order, so identical parameters give identical instances. Spaceoids
are valid by construction: maximal pair subgroupoids are sampled whole and
the cocycle is a random coboundary.
"""

import logging
import string
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from .config import settings
from .cstarcat import FiniteCStarCategory, StarFunctor
from .functors import gamma_on_morphism, sections_category
from .spaceoid import FiniteSpaceoid, Point, SpaceoidMorphism, derive_point_map, pair_components

logger = logging.getLogger(__name__)

Pair = tuple[str, str]


class GenParams(BaseModel):
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    n_objects: int = Field(default=3, ge=1, le=settings.MAX_OBJECTS)
    max_base: int = Field(default=3, ge=1, le=6)
    edge_density: float = Field(default=0.5, ge=0.0, le=1.0)
    phase_mode: Literal["trivial", "random"] = "random"
    scramble: Literal["none", "unitary", "invertible"] = "unitary"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _unit_phase(rng: np.random.Generator) -> complex:
    return complex(np.exp(2j * np.pi * rng.random()))


def _object_labels(n: int) -> list[str]:
    return list(string.ascii_uppercase[:n])


def _point_id(a: str, x: str, b: str, y: str) -> str:
    return f"{a}.{x}-{b}.{y}"


# -------------------------------------------------
# Spaceoids
# -------------------------------------------------
def _spaceoid_from_blocks(objects: list[str], base_sets: dict[str, list[str]], blocks: list[dict[str, str]]) -> FiniteSpaceoid:
    points: dict[Pair, list[Point]] = {}
    for block in blocks:
        for a in block:
            for b in block:
                if a != b:
                    points.setdefault((a, b), []).append(Point(_point_id(a, block[a], b, block[b]), block[a], block[b]))
    return FiniteSpaceoid.build(objects, base_sets, points)


def random_gauge(s: FiniteSpaceoid, rng: np.random.Generator) -> FiniteSpaceoid:
    """Re-frame every off-diagonal point of ``s`` by a random unit phase."""
    lam = {p.id: _unit_phase(rng) for pts in s.points.values() for p in pts}

    def lam_of(p: Point) -> complex:
        return lam.get(p.id, 1.0 + 0.0j)

    phases = {}
    for a, b, c, p, q in s.composable():
        pq = s.compose(a, b, c, p, q)
        phases[(p.id, q.id)] = lam_of(p) * lam_of(q) * s.cocycle(p, q) / lam_of(pq)
    nu = {}
    for pts in s.points.values():
        for p in pts:
            nu[p.id] = np.conj(lam_of(p)) * s.nu_of(p) / lam_of(s.star(p.id))
    return FiniteSpaceoid(s.objects, s.base_sets, s.points, phases, nu)


def _gen_spaceoid(params: GenParams, rng: np.random.Generator) -> FiniteSpaceoid:
    objects = _object_labels(params.n_objects)
    base_sets = {}
    for a in objects:
        size = int(rng.integers(1, params.max_base + 1))
        base_sets[a] = [f"{a.lower()}{i}" for i in range(size)]

    # Blocks are sampled whole: each base point joins a block lacking its object, or opens one.
    blocks: list[dict[str, str]] = []
    for a in objects:
        for x in base_sets[a]:
            open_blocks = [block for block in blocks if a not in block]
            if open_blocks and rng.random() < params.edge_density:
                open_blocks[int(rng.integers(len(open_blocks)))][a] = x
            else:
                blocks.append({a: x})

    s = _spaceoid_from_blocks(objects, base_sets, blocks)
    if params.phase_mode == "random":
        s = random_gauge(s, rng)
    return s


def gen_spaceoid(params: GenParams) -> FiniteSpaceoid:
    s = _gen_spaceoid(params, make_rng(params.seed))
    logger.debug("🔄 generated spaceoid: seed=%d, %d points", params.seed, s.point_count())
    return s


# -------------------------------------------------
# Basis scrambles
# -------------------------------------------------
def _random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def _basis_change(n: int, mode: str, rng: np.random.Generator) -> np.ndarray:
    if n == 0 or mode == "none":
        return np.eye(n, dtype=complex)
    if mode == "unitary":
        return _random_unitary(n, rng)
    stretch = rng.uniform(0.5, 2.0, size=n)
    return _random_unitary(n, rng) @ np.diag(stretch) @ _random_unitary(n, rng)


def scramble_category(
    c: FiniteCStarCategory, mode: str, rng: np.random.Generator
) -> tuple[FiniteCStarCategory, dict[Pair, np.ndarray]]:
    """Transport the structure constants to new bases; columns of P are the new basis vectors."""
    changes = {pair: _basis_change(c.dim(*pair), mode, rng) for pair in c.pairs()}
    if mode == "none":
        return c, changes
    inverses = {pair: np.linalg.inv(p) if p.size else p for pair, p in changes.items()}

    comp = {}
    for (a, b, d), t in c.comp.items():
        comp[(a, b, d)] = np.einsum("xi,yj,xyz,kz->ijk", changes[(a, b)], changes[(b, d)], t, inverses[(a, d)]) if t.size else t
    invol = {}
    for (a, b), j in c.invol.items():
        invol[(a, b)] = inverses[(b, a)] @ j @ np.conj(changes[(a, b)]) if j.size else j
    unit = {a: inverses[(a, a)] @ u for a, u in c.unit.items()}
    return FiniteCStarCategory.build(c.objects, c.dims, comp, invol, unit), changes


def transport_functor(
    f: StarFunctor,
    source: FiniteCStarCategory,
    source_changes: dict[Pair, np.ndarray],
    target: FiniteCStarCategory,
    target_changes: dict[Pair, np.ndarray],
) -> StarFunctor:
    """The functor between scrambled copies that agrees with ``f`` on the abstract categories."""
    hom_maps = {}
    for (a, b), m in f.hom_maps.items():
        p_src = source_changes[(a, b)]
        p_dst = target_changes[f.target_pair(a, b)]
        hom_maps[(a, b)] = np.linalg.solve(p_dst, m @ p_src) if m.size else m.copy()
    return StarFunctor(source, target, dict(f.obj_map), hom_maps)


def gen_category(params: GenParams) -> tuple[FiniteCStarCategory, FiniteSpaceoid]:
    """Γ of a random spaceoid in scrambled bases, with that spaceoid as oracle."""
    rng = make_rng(params.seed)
    oracle = _gen_spaceoid(params, rng)
    c, _ = scramble_category(sections_category(oracle), params.scramble, rng)
    logger.debug("🔄 generated category: seed=%d, scramble=%s", params.seed, params.scramble)
    return c, oracle


# -------------------------------------------------
# Morphisms
# -------------------------------------------------
def _gen_morphism(target: FiniteSpaceoid, rng: np.random.Generator) -> SpaceoidMorphism:
    objects = list(target.objects)
    image = [objects[i] for i in rng.permutation(len(objects))]
    obj_map = dict(zip(objects, image))
    back = {b: a for a, b in obj_map.items()}

    base_sets: dict[str, list[str]] = {a: [] for a in objects}
    base_map: dict[str, dict[str, str]] = {a: {} for a in objects}
    blocks: list[dict[str, str]] = []

    def add_block(target_block: dict[str, str], members: list[str]) -> None:
        block = {}
        for b in members:
            a = back[b]
            x = f"{a.lower()}{len(base_sets[a])}"
            base_sets[a].append(x)
            base_map[a][x] = target_block[b]
            block[a] = x
        blocks.append(block)

    # Every source block covers the whole target block it lands in; a target
    # block may receive one or two copies, so base maps need not be injective.
    for target_block in pair_components(target):
        members = list(target_block)
        for _ in range(int(rng.integers(1, 3))):
            add_block(target_block, [members[i] for i in rng.permutation(len(members))])

    skeleton = _spaceoid_from_blocks(objects, base_sets, blocks)
    point_map = derive_point_map(skeleton, target, obj_map, base_map)
    scalars = {pid: _unit_phase(rng) for pid in point_map}

    def f_scalar(pid: str) -> complex:
        return scalars.get(pid, 1.0 + 0.0j)

    def image_of(p: Point) -> Point:
        if ":" in p.id:
            a, x = p.id.split(":", 1)
            return Point(f"{obj_map[a]}:{base_map[a][x]}", base_map[a][x], base_map[a][x])
        return target.locate(point_map[p.id])[2]

    # Pull the target cocycle back and twist it by F, so (f, F) is a morphism.
    phases = {}
    for a, b, c, p, q in skeleton.composable():
        pq = skeleton.compose(a, b, c, p, q)
        phases[(p.id, q.id)] = f_scalar(pq.id) * target.cocycle(image_of(p), image_of(q)) / (f_scalar(p.id) * f_scalar(q.id))
    nu = {}
    for pts in skeleton.points.values():
        for p in pts:
            nu[p.id] = target.nu_of(image_of(p)) * f_scalar(skeleton.star(p.id).id) / np.conj(f_scalar(p.id))
    source = FiniteSpaceoid(skeleton.objects, skeleton.base_sets, skeleton.points, phases, nu)
    return SpaceoidMorphism(source, target, obj_map, base_map, point_map, scalars)


def gen_morphism(target: FiniteSpaceoid, params: GenParams) -> SpaceoidMorphism:
    """A random source spaceoid with a morphism into ``target``."""
    return _gen_morphism(target, make_rng(params.seed))


def gen_morphism_pair(params: GenParams) -> tuple[SpaceoidMorphism, SpaceoidMorphism]:
    """(m1: E¹ → E², m2: E² → E³), composable."""
    rng = make_rng(params.seed)
    e3 = _gen_spaceoid(params, rng)
    m2 = _gen_morphism(e3, rng)
    m1 = _gen_morphism(m2.source, rng)
    return m1, m2


def gen_functor_pair(params: GenParams) -> tuple[StarFunctor, StarFunctor]:
    """(first: C³ → C², second: C² → C¹), Γ of a morphism pair in scrambled bases."""
    rng = make_rng(params.seed)
    e3 = _gen_spaceoid(params, rng)
    m2 = _gen_morphism(e3, rng)
    m1 = _gen_morphism(m2.source, rng)
    psi, phi = gamma_on_morphism(m2), gamma_on_morphism(m1)

    scrambled = {}
    for label, space in (("1", m1.source), ("2", m1.target), ("3", e3)):
        scrambled[label] = scramble_category(sections_category(space), params.scramble, rng)
    (c1, p1), (c2, p2), (c3, p3) = scrambled["1"], scrambled["2"], scrambled["3"]
    first = transport_functor(psi, c3, p3, c2, p2)
    second = transport_functor(phi, c2, p2, c1, p1)
    return first, second
