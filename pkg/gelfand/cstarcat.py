"""Finite-dimensional commutative C*-categories.

A category is stored by structure constants: ``comp[(A, B, C)]`` has shape
``(d_AB, d_BC, d_AC)`` and the composite of coordinate vectors ``x`` and
``y`` is ``einsum('i,j,ijk->k', x, y, comp)``. The involution is antilinear
and stored as the matrix ``J`` with ``x* = J @ conj(x)``.

Everything spectral (characters of diagonals, minimal idempotents, the unit
vectors of nonzero corners) is derived once per tolerance and memoised on the
category as a :class:`SpectralFrame`.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional, Union

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from .config import settings
from .exceptions import (
    BimoduleAxiomViolation,
    CornerDimensionExceedsOne,
    DiagonalNotSemisimple,
    HolonomyViolation,
    InvalidCategory,
    InvalidFunctor,
    NumlinError,
)
from .numlin import (
    Tolerance,
    hermitian_eig,
    image_basis,
    joint_spectrum,
    max_abs,
    simultaneous_diag,
    whitening,
)
from .reports import DegeneracyWitness, NonDegeneracyResult, ValidationReport

logger = logging.getLogger(__name__)

Pair = tuple[str, str]
Triple = tuple[str, str, str]


def _loose(*scales: float) -> float:
    return settings.MATCH_TOL * (1.0 + max(scales, default=0.0))


def _strict(tol: Tolerance, *scales: float) -> float:
    return tol.abs_eps * (1.0 + max(scales, default=0.0))


# -------------------------------------------------
# Categories
# -------------------------------------------------
@dataclass(frozen=True, eq=False)
class FiniteCStarCategory:
    objects: tuple[str, ...]
    dims: dict[Pair, int]
    comp: dict[Triple, np.ndarray]
    invol: dict[Pair, np.ndarray]
    unit: dict[str, np.ndarray]
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def build(cls, objects, dims, comp=None, invol=None, unit=None) -> "FiniteCStarCategory":
        """Normalise raw data: missing Hom-sets are zero, arrays become complex."""
        objects = tuple(objects)
        if len(set(objects)) != len(objects):
            raise InvalidCategory("object labels must be distinct", witness={"objects": list(objects)})
        comp, invol, unit = comp or {}, invol or {}, unit or {}
        full_dims = {(a, b): int(dims.get((a, b), 0)) for a, b in product(objects, repeat=2)}
        if any(d < 0 for d in full_dims.values()):
            raise InvalidCategory("Hom dimensions must be non-negative")

        full_comp = {}
        for a, b, c in product(objects, repeat=3):
            shape = (full_dims[(a, b)], full_dims[(b, c)], full_dims[(a, c)])
            full_comp[(a, b, c)] = _shaped(comp.get((a, b, c)), shape, f"comp[{a}|{b}|{c}]")
        full_invol = {}
        for a, b in product(objects, repeat=2):
            shape = (full_dims[(b, a)], full_dims[(a, b)])
            full_invol[(a, b)] = _shaped(invol.get((a, b)), shape, f"invol[{a}|{b}]")
        full_unit = {a: _shaped(unit.get(a), (full_dims[(a, a)],), f"unit[{a}]") for a in objects}
        return cls(objects, full_dims, full_comp, full_invol, full_unit)

    def dim(self, a: str, b: str) -> int:
        return self.dims[(a, b)]

    def pairs(self, off_diagonal: bool = False) -> Iterator[Pair]:
        for a, b in product(self.objects, repeat=2):
            if not (off_diagonal and a == b):
                yield a, b

    def basis(self, a: str, b: str) -> np.ndarray:
        return np.eye(self.dims[(a, b)], dtype=complex)

    def compose(self, a: str, b: str, c: str, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(x, dtype=complex), np.asarray(y, dtype=complex), self.comp[(a, b, c)])

    def adjoint(self, a: str, b: str, x) -> np.ndarray:
        return self.invol[(a, b)] @ np.conj(np.asarray(x, dtype=complex))

    def left_operator(self, a: str, b: str, c: str, x) -> np.ndarray:
        """Matrix of y ↦ x∘y from C_BC to C_AC."""
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=complex), self.comp[(a, b, c)])

    def right_operator(self, a: str, b: str, c: str, y) -> np.ndarray:
        """Matrix of x ↦ x∘y from C_AB to C_AC."""
        return np.einsum("j,ijk->ki", np.asarray(y, dtype=complex), self.comp[(a, b, c)])

    def scale(self) -> float:
        return max([max_abs(t) for t in self.comp.values()] + [max_abs(j) for j in self.invol.values()] + [1.0])


def _shaped(data, shape: tuple[int, ...], label: str) -> np.ndarray:
    if data is None:
        return np.zeros(shape, dtype=complex)
    arr = np.asarray(data, dtype=complex)
    if arr.size == 0 and 0 in shape:
        return np.zeros(shape, dtype=complex)
    if arr.shape != shape:
        raise InvalidCategory(f"{label} has shape {arr.shape}, expected {shape}", witness={"field": label})
    if not np.all(np.isfinite(arr)):
        raise InvalidCategory(f"{label} has non-finite entries", witness={"field": label})
    return arr


def categories_equal(c1: FiniteCStarCategory, c2: FiniteCStarCategory, tol: Optional[Tolerance] = None) -> bool:
    if c1 is c2:
        return True
    if c1.objects != c2.objects or c1.dims != c2.dims:
        return False
    bound = _loose(c1.scale(), c2.scale()) if tol is None else _strict(tol, c1.scale(), c2.scale())
    return (
        all(max_abs(c1.comp[k] - c2.comp[k]) <= bound for k in c1.comp)
        and all(max_abs(c1.invol[k] - c2.invol[k]) <= bound for k in c1.invol)
        and all(max_abs(c1.unit[k] - c2.unit[k]) <= bound for k in c1.unit)
    )


def is_discrete(c: FiniteCStarCategory) -> bool:
    return all(c.dim(a, b) == 0 for a, b in c.pairs(off_diagonal=True))


# -------------------------------------------------
# Characters of diagonals
# -------------------------------------------------
@dataclass(frozen=True, eq=False)
class Character:
    """A *-functor to ℂ: one diagonal character per object plus a covector per Hom-set."""
    object_assignment: dict[str, int]
    hom_values: dict[Pair, np.ndarray]

    def value(self, a: str, b: str, x) -> complex:
        covector = self.hom_values.get((a, b))
        if covector is None:
            return 0.0j
        return complex(covector @ np.asarray(x, dtype=complex))


def _sort_key(row: np.ndarray) -> tuple:
    return tuple(v for z in row for v in (round(float(z.real), 6) + 0.0, round(float(z.imag), 6) + 0.0))


def _character_matrix(c: FiniteCStarCategory, a: str, tol: Tolerance) -> np.ndarray:
    key = ("characters", a, tol)
    if key in c._memo:
        return c._memo[key]
    d = c.dim(a, a)
    if d == 0:
        values = np.zeros((0, 0), dtype=complex)
        c._memo[key] = values
        return values

    t = c.comp[(a, a, a)]
    ops = [t[k].T for k in range(d)]
    # Gram matrix of the faithful trace τ(z) = Tr(L_z); whitening makes L_k normal
    # in bases that are not orthonormal for it.
    traces = np.array([np.trace(op) for op in ops])
    gram = np.einsum("ai,ajk,k->ij", c.invol[(a, a)], t, traces)
    gram = 0.5 * (gram + gram.conj().T)
    try:
        frames = whitening(gram, tol)
    except NumlinError:
        frames = None
    if frames is not None:
        r, r_inv = frames
        normal_ops = [r @ op @ r_inv for op in ops]
    else:
        normal_ops = ops

    try:
        u = simultaneous_diag(normal_ops, tol)
    except NumlinError as exc:
        raise DiagonalNotSemisimple(f"C_{a}{a} is not a commutative C*-algebra: {exc.detail}", witness={"object": a}) from exc
    values = joint_spectrum(normal_ops, u)
    order = sorted(range(d), key=lambda p: _sort_key(values[p]), reverse=True)
    values = values[order]
    c._memo[key] = values
    return values


def _check_diagonal_characters(c: FiniteCStarCategory, a: str, values: np.ndarray, report: ValidationReport) -> None:
    t = c.comp[(a, a, a)]
    bound = _loose(max_abs(values) ** 2)
    product_values = np.einsum("pk,ijk->pij", values, t)
    expected = values[:, :, None] * values[:, None, :]
    deviation = max_abs(product_values - expected)
    if deviation > bound:
        p, i, j = np.unravel_index(np.argmax(np.abs(product_values - expected)), expected.shape)
        report.fail("character_multiplicative", f"character {p} of C_{a}{a}", deviation, object=a, character=int(p), basis=[int(i), int(j)])
    deviation = max_abs(values @ c.unit[a] - 1.0)
    if deviation > bound:
        report.fail("character_unital", f"characters of C_{a}{a} at the unit", deviation, object=a)
    adjoints = values @ c.invol[(a, a)]
    deviation = max_abs(adjoints - np.conj(values))
    if deviation > bound:
        p, k = np.unravel_index(np.argmax(np.abs(adjoints - np.conj(values))), values.shape)
        report.fail("character_involutive", f"character {p} of C_{a}{a}", deviation, object=a, character=int(p), basis=int(k))


def characters_of_diagonal(c: FiniteCStarCategory, a: str, tol: Optional[Tolerance] = None, strict: bool = True) -> list[Character]:
    """Characters of C_AA, ordered lexicographically (descending) by value tuple."""
    tol = Tolerance.coerce(tol)
    if a not in c.objects:
        raise InvalidCategory(f"unknown object {a!r}")
    values = character_matrix(c, a, tol, strict=strict)
    return [Character({a: p}, {(a, a): values[p]}) for p in range(values.shape[0])]


def character_matrix(c: FiniteCStarCategory, a: str, tol: Optional[Tolerance] = None, strict: bool = True) -> np.ndarray:
    """Row p holds χ_p(b_k) for the basis b_k of C_AA."""
    tol = Tolerance.coerce(tol)
    values = _character_matrix(c, a, tol)
    if strict and values.size:
        report = ValidationReport(subject=f"characters of {a}")
        _check_diagonal_characters(c, a, values, report)
        if not report.valid:
            raise DiagonalNotSemisimple(f"C_{a}{a} has no full set of characters", witness=report.failures[0].model_dump())
    return values


def minimal_idempotents(c: FiniteCStarCategory, a: str, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Row p is the coordinate vector of e_p, the idempotent with χ_q(e_p) = δ_pq."""
    values = character_matrix(c, a, tol)
    if not values.size:
        return values
    return np.linalg.inv(values).T


def _character_index(ch: Union[Character, int], a: str) -> int:
    return ch.object_assignment[a] if isinstance(ch, Character) else int(ch)


# -------------------------------------------------
# Corners and the spectral frame
# -------------------------------------------------
def _corner_operator(c: FiniteCStarCategory, a: str, b: str, p: int, q: int, tol: Tolerance) -> np.ndarray:
    e_p = minimal_idempotents(c, a, tol)[p]
    e_q = minimal_idempotents(c, b, tol)[q]
    return c.left_operator(a, a, b, e_p) @ c.right_operator(a, b, b, e_q)


def corner(c: FiniteCStarCategory, a: str, b: str, p, q, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Orthonormal basis (columns) of e_p∘C_AB∘e_q."""
    tol = Tolerance.coerce(tol)
    p, q = _character_index(p, a), _character_index(q, b)
    if c.dim(a, b) == 0:
        return np.zeros((0, 0), dtype=complex)
    basis = image_basis(_corner_operator(c, a, b, p, q, tol), tol)
    if basis.shape[1] > 1:
        raise CornerDimensionExceedsOne(
            f"corner ({p},{q}) of C_{a}{b} has dimension {basis.shape[1]}",
            witness={"source": a, "target": b, "p": p, "q": q, "dimension": int(basis.shape[1])},
        )
    return basis


def cstar_norm(c: FiniteCStarCategory, a: str, b: str, x, tol: Optional[Tolerance] = None) -> float:
    tol = Tolerance.coerce(tol)
    x = np.asarray(x, dtype=complex)
    if c.dim(b, b) == 0 or not x.size:
        return 0.0
    square = c.compose(b, a, b, c.adjoint(a, b, x), x)
    values = np.real(character_matrix(c, b, tol, strict=False) @ square)
    return float(np.sqrt(max(values.max(), 0.0)))


@dataclass(frozen=True, eq=False)
class CornerFrame:
    """Unit vector of a nonzero corner and the covector reading coefficients along it."""
    unit: np.ndarray
    covector: np.ndarray


@dataclass(frozen=True, eq=False)
class SpectralFrame:
    characters: dict[str, np.ndarray]
    idempotents: dict[str, np.ndarray]
    corners: dict[Pair, dict[tuple[int, int], CornerFrame]]
    blocks: list[dict[str, int]]

    def linked(self, a: str, b: str) -> list[tuple[int, int]]:
        if a == b:
            return [(p, p) for p in range(self.characters[a].shape[0])]
        return sorted(self.corners[(a, b)])

    def partner(self, a: str, p: int, b: str) -> Optional[int]:
        if a == b:
            return p
        for pp, q in self.corners[(a, b)]:
            if pp == p:
                return q
        return None

    def block_of(self, a: str, p: int) -> dict[str, int]:
        for block in self.blocks:
            if block.get(a) == p:
                return block
        return {a: p}

    def coefficient(self, a: str, b: str, point: tuple[int, int], x) -> complex:
        """Coefficient of e_p∘x∘e_q against the chosen unit vector."""
        if a == b:
            return complex(self.characters[a][point[0]] @ np.asarray(x, dtype=complex))
        return complex(self.corners[(a, b)][point].covector @ np.asarray(x, dtype=complex))

    def unit_vector(self, a: str, b: str, point: tuple[int, int]) -> np.ndarray:
        if a == b:
            return self.idempotents[a][point[0]]
        return self.corners[(a, b)][point].unit


def _unit_vector(c: FiniteCStarCategory, a: str, b: str, v: np.ndarray, tol: Tolerance) -> np.ndarray:
    v = v / cstar_norm(c, a, b, v, tol)
    magnitudes = np.abs(v)
    lead = int(np.argmax(magnitudes > 1e-6 * magnitudes.max()))
    return v * np.conj(v[lead]) / magnitudes[lead]


def linked_pairs(c: FiniteCStarCategory, tol: Optional[Tolerance] = None) -> SpectralFrame:
    """Characters, idempotents and nonzero corners of every Hom-set (memoised)."""
    tol = Tolerance.coerce(tol)
    key = ("frame", tol)
    if key in c._memo:
        return c._memo[key]

    characters = {a: character_matrix(c, a, tol) for a in c.objects}
    idempotents = {a: minimal_idempotents(c, a, tol) for a in c.objects}
    corners: dict[Pair, dict[tuple[int, int], CornerFrame]] = {}
    for a, b in c.pairs(off_diagonal=True):
        corners[(a, b)] = {}
        if c.dim(a, b) == 0:
            continue
        lefts = [c.left_operator(a, a, b, e) for e in idempotents[a]]
        rights = [c.right_operator(a, b, b, e) for e in idempotents[b]]
        for p, q in product(range(len(lefts)), range(len(rights))):
            k = lefts[p] @ rights[q]
            if max_abs(k) <= _loose():
                continue
            basis = corner(c, a, b, p, q, tol)
            if basis.shape[1] == 0:
                continue
            u = _unit_vector(c, a, b, basis[:, 0], tol)
            covector = (u.conj() @ k) / (u.conj() @ u)
            corners[(a, b)][(p, q)] = CornerFrame(u, covector)

        points = corners[(a, b)]
        for side in (0, 1):
            seen: dict[int, tuple[int, int]] = {}
            for point in sorted(points):
                if point[side] in seen:
                    raise HolonomyViolation(
                        f"character {point[side]} of {(a, b)[side]} has two partners in C_{a}{b}",
                        witness={"source": a, "target": b, "points": [list(seen[point[side]]), list(point)]},
                    )
                seen[point[side]] = point

    frame = SpectralFrame(characters, idempotents, corners, _blocks(c, characters, corners))
    c._memo[key] = frame
    logger.debug("✅ spectral frame: %d linked pairs", sum(len(v) for v in corners.values()))
    return frame


def _blocks(c: FiniteCStarCategory, characters: dict, corners: dict) -> list[dict[str, int]]:
    """Maximal pair subgroupoids: connected components of the linking graph."""
    nodes = [(a, p) for a in c.objects for p in range(characters[a].shape[0])]
    if not nodes:
        return []
    index = {node: i for i, node in enumerate(nodes)}
    rows, cols = [], []
    for (a, b), points in corners.items():
        for p, q in points:
            rows.append(index[(a, p)])
            cols.append(index[(b, q)])
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    count, labels = csgraph.connected_components(graph, directed=False)

    blocks: list[dict[str, int]] = [dict() for _ in range(count)]
    for (a, p), label in zip(nodes, labels):
        if a in blocks[label]:
            raise HolonomyViolation(
                f"characters {blocks[label][a]} and {p} of {a} are linked by a chain of corners",
                witness={"object": a, "characters": [blocks[label][a], p]},
            )
        blocks[label][a] = p
    first_seen = {}
    for (a, p), label in zip(nodes, labels):
        first_seen.setdefault(label, len(first_seen))
    return [blocks[label] for label in sorted(first_seen, key=first_seen.get)]


def is_full(c: FiniteCStarCategory, tol: Optional[Tolerance] = None) -> bool:
    frame = linked_pairs(c, tol)
    return all(
        len(frame.corners[(a, b)]) == frame.characters[a].shape[0] * frame.characters[b].shape[0]
        for a, b in c.pairs(off_diagonal=True)
    )


def inner_product_supports(c: FiniteCStarCategory, a: str, b: str, tol: Optional[Tolerance] = None) -> tuple[set[int], set[int]]:
    """Spectral supports of the ideals spanned by C_AB∘C_AB* in C_AA and C_AB*∘C_AB in C_BB."""
    frame = linked_pairs(c, tol)
    points = frame.linked(a, b)
    return {p for p, _ in points}, {q for _, q in points}


# -------------------------------------------------
# Orbit classes of characters
# -------------------------------------------------
@dataclass(frozen=True)
class OrbitClass:
    """Component data of a class of *-functors to ℂ, up to per-Hom-set phases."""
    characters: tuple[tuple[str, int], ...]
    components: tuple[tuple[str, ...], ...]
    zero_homs: frozenset[Pair]

    def character_of(self, a: str) -> int:
        return dict(self.characters)[a]

    def to_dict(self) -> dict:
        return {
            "characters": {a: p for a, p in self.characters},
            "components": [list(block) for block in self.components],
            "zero_homs": sorted(f"{a}|{b}" for a, b in self.zero_homs),
        }


def enumerate_orbit_classes(c: FiniteCStarCategory, tol: Optional[Tolerance] = None) -> list[OrbitClass]:
    """Every system of diagonal characters whose linked blocks tile the object set."""
    frame = linked_pairs(c, tol)
    order = {a: i for i, a in enumerate(c.objects)}
    blocks = [dict(sorted(b.items(), key=lambda kv: order[kv[0]])) for b in frame.blocks]
    containing: dict[str, list[dict[str, int]]] = {a: [] for a in c.objects}
    for block in blocks:
        containing[next(iter(block))].append(block)

    classes: list[OrbitClass] = []

    def extend(chosen: list[dict[str, int]], covered: set[str]) -> None:
        pending = [a for a in c.objects if a not in covered]
        if not pending:
            assignment = {a: p for block in chosen for a, p in block.items()}
            components = tuple(tuple(block) for block in chosen)
            block_of = {a: i for i, block in enumerate(chosen) for a in block}
            zero = frozenset((a, b) for a, b in c.pairs(off_diagonal=True) if block_of[a] != block_of[b])
            classes.append(OrbitClass(tuple((a, assignment[a]) for a in c.objects), components, zero))
            return
        for block in containing[pending[0]]:
            if covered.isdisjoint(block):
                extend(chosen + [block], covered | set(block))

    extend([], set())
    if not classes and c.objects:
        logger.warning("⚠️ no system of characters tiles the objects; [C;ℂ] is empty")
    return classes


def class_representative(c: FiniteCStarCategory, orbit_class: OrbitClass, tol: Optional[Tolerance] = None) -> Character:
    """The member of a class with value 1 on the unit vectors of a star tree in each block."""
    tol = Tolerance.coerce(tol)
    frame = linked_pairs(c, tol)
    assignment = dict(orbit_class.characters)
    hom_values = {(a, b): np.zeros(c.dim(a, b), dtype=complex) for a, b in c.pairs()}
    for a in c.objects:
        hom_values[(a, a)] = frame.characters[a][assignment[a]].copy()

    for block in orbit_class.components:
        root = block[0]
        point = {(a, b): (assignment[a], assignment[b]) for a, b in product(block, repeat=2) if a != b}
        phase: dict[Pair, complex] = {}
        for a in block[1:]:
            phase[(root, a)] = 1.0
            nu = frame.coefficient(a, root, point[(a, root)], c.adjoint(root, a, frame.unit_vector(root, a, point[(root, a)])))
            phase[(a, root)] = 1.0 / nu
        for a, b in product(block[1:], repeat=2):
            if a == b:
                continue
            glued = c.compose(a, root, b, frame.unit_vector(a, root, point[(a, root)]), frame.unit_vector(root, b, point[(root, b)]))
            cocycle = frame.coefficient(a, b, point[(a, b)], glued)
            phase[(a, b)] = phase[(a, root)] * phase[(root, b)] / cocycle
        for (a, b), value in phase.items():
            hom_values[(a, b)] = value * frame.corners[(a, b)][point[(a, b)]].covector
    return Character(assignment, hom_values)


def check_character(c: FiniteCStarCategory, omega: Character, tol: Optional[Tolerance] = None) -> ValidationReport:
    report = ValidationReport(subject="character")
    for check in ("multiplicative", "unital", "involutive"):
        report.record(check)
    w = {pair: omega.hom_values.get(pair, np.zeros(c.dim(*pair), dtype=complex)) for pair in c.pairs()}
    for a, b, d in product(c.objects, repeat=3):
        t = c.comp[(a, b, d)]
        if not t.size:
            continue
        lhs = np.einsum("ijk,k->ij", t, w[(a, d)])
        rhs = np.outer(w[(a, b)], w[(b, d)])
        deviation = max_abs(lhs - rhs)
        if deviation > _loose(max_abs(rhs)):
            report.fail("multiplicative", f"on C_{a}{b} × C_{b}{d}", deviation, triple=[a, b, d])
    for a in c.objects:
        deviation = abs(complex(w[(a, a)] @ c.unit[a]) - 1.0)
        if deviation > _loose():
            report.fail("unital", f"at the unit of {a}", deviation, object=a)
    for a, b in c.pairs():
        if not c.dim(a, b):
            continue
        deviation = max_abs(w[(b, a)] @ c.invol[(a, b)] - np.conj(w[(a, b)]))
        if deviation > _loose(max_abs(w[(a, b)])):
            report.fail("involutive", f"on C_{a}{b}", deviation, pair=[a, b])
    return report


# -------------------------------------------------
# Validation
# -------------------------------------------------
def validate_category(c: FiniteCStarCategory, tol: Optional[Tolerance] = None) -> ValidationReport:
    tol = Tolerance.coerce(tol)
    report = ValidationReport(subject="category")
    scale = c.scale()
    bound = _strict(tol, scale ** 2) * 10

    report.record("associativity")
    for a, b, d, e in product(c.objects, repeat=4):
        left = np.einsum("ijm,mkl->ijkl", c.comp[(a, b, d)], c.comp[(a, d, e)])
        right = np.einsum("jkn,inl->ijkl", c.comp[(b, d, e)], c.comp[(a, b, e)])
        if not left.size:
            continue
        diff = np.abs(left - right)
        deviation = max_abs(diff)
        if deviation > bound:
            i, j, k, _ = np.unravel_index(np.argmax(diff), diff.shape)
            report.fail("associativity", f"(x∘y)∘z ≠ x∘(y∘z) on {a}{b}{d}{e}", deviation, objects=[a, b, d, e], basis=[int(i), int(j), int(k)])

    report.record("unit_laws")
    for a, b in c.pairs():
        n = c.dim(a, b)
        if not n:
            continue
        left = c.left_operator(a, a, b, c.unit[a])
        right = c.right_operator(a, b, b, c.unit[b])
        for side, op in (("left", left), ("right", right)):
            deviation = max_abs(op - np.eye(n))
            if deviation > bound:
                report.fail("unit_laws", f"{side} unit law on C_{a}{b}", deviation, pair=[a, b])

    report.record("involution")
    for a, b in c.pairs():
        if not c.dim(a, b):
            continue
        deviation = max_abs(c.invol[(b, a)] @ np.conj(c.invol[(a, b)]) - np.eye(c.dim(a, b)))
        if deviation > bound:
            report.fail("involution", f"x** ≠ x on C_{a}{b}", deviation, pair=[a, b])
    for a, b, d in product(c.objects, repeat=3):
        t = c.comp[(a, b, d)]
        if not t.size:
            continue
        lhs = np.einsum("kl,ijl->ijk", c.invol[(a, d)], np.conj(t))
        rhs = np.einsum("aj,bi,abk->ijk", c.invol[(b, d)], c.invol[(a, b)], c.comp[(d, b, a)])
        diff = np.abs(lhs - rhs)
        deviation = max_abs(diff)
        if deviation > bound:
            i, j, _ = np.unravel_index(np.argmax(diff), diff.shape)
            report.fail("involution", f"(x∘y)* ≠ y*∘x* on {a}{b}{d}", deviation, objects=[a, b, d], basis=[int(i), int(j)])
    for a in c.objects:
        if c.dim(a, a):
            deviation = max_abs(c.adjoint(a, a, c.unit[a]) - c.unit[a])
            if deviation > bound:
                report.fail("involution", f"ι_{a}* ≠ ι_{a}", deviation, object=a)

    report.record("commutativity")
    for a in c.objects:
        t = c.comp[(a, a, a)]
        if not t.size:
            continue
        diff = np.abs(t - t.transpose(1, 0, 2))
        deviation = max_abs(diff)
        if deviation > bound:
            i, j, _ = np.unravel_index(np.argmax(diff), diff.shape)
            report.fail("commutativity", f"C_{a}{a} is not commutative", deviation, object=a, basis=[int(i), int(j)])

    if report.failed_axioms() & {"associativity", "unit_laws", "commutativity"}:
        logger.info("❌ structural axioms failed; skipping positivity")
        return report

    report.record("positivity")
    characters = {}
    for a in c.objects:
        try:
            characters[a] = character_matrix(c, a, tol, strict=False)
        except DiagonalNotSemisimple as exc:
            report.fail("positivity", exc.detail, object=a)
            continue
        _check_diagonal_characters(c, a, characters[a], report)
    for a, b in c.pairs():
        n = c.dim(a, b)
        if not n or b not in characters:
            continue
        # forms[q][i, j] = q(b_i* ∘ b_j); positivity of x*∘x for every x is their semidefiniteness
        squares = np.einsum("ai,ajk->ijk", c.invol[(a, b)], c.comp[(b, a, b)])
        forms = np.einsum("qk,ijk->qij", characters[b], squares)
        for q, form in enumerate(forms):
            diagonal = np.diag(form)
            norms = np.abs(diagonal)
            threshold = settings.POSITIVITY_EPS * (1.0 + norms)
            bad = np.flatnonzero((diagonal.real < -threshold) | (np.abs(diagonal.imag) > threshold))
            if bad.size:
                i = int(bad[0])
                report.fail("positivity", f"spectrum of x*∘x for basis {i} of C_{a}{b}", float(-diagonal[i].real), pair=[a, b], basis=i, character=q, value=[float(diagonal[i].real), float(diagonal[i].imag)])
                break
            hermitian_form = 0.5 * (form + form.conj().T)
            try:
                eigenvalues, _ = hermitian_eig(hermitian_form, Tolerance(max(tol.abs_eps, settings.POSITIVITY_EPS), tol.rel_eps))
            except NumlinError:
                continue
            if eigenvalues.size and eigenvalues[0] < -settings.POSITIVITY_EPS * (1.0 + abs(eigenvalues[-1])):
                report.fail("positivity", f"x*∘x is not positive for some x in C_{a}{b}", float(-eigenvalues[0]), pair=[a, b], character=q)
                break

    if report.valid:
        logger.debug("✅ category with %d objects is valid", len(c.objects))
    return report


# -------------------------------------------------
# *-functors
# -------------------------------------------------
@dataclass(frozen=True, eq=False)
class StarFunctor:
    source: FiniteCStarCategory
    target: FiniteCStarCategory
    obj_map: dict[str, str]
    hom_maps: dict[Pair, np.ndarray]

    @classmethod
    def build(cls, source, target, obj_map, hom_maps=None) -> "StarFunctor":
        hom_maps = hom_maps or {}
        full = {}
        for a, b in source.pairs():
            shape = (target.dim(obj_map[a], obj_map[b]), source.dim(a, b))
            full[(a, b)] = _shaped(hom_maps.get((a, b)), shape, f"hom_maps[{a}|{b}]")
        return cls(source, target, dict(obj_map), full)

    def target_pair(self, a: str, b: str) -> Pair:
        return self.obj_map[a], self.obj_map[b]

    def apply(self, a: str, b: str, x) -> np.ndarray:
        return self.hom_maps[(a, b)] @ np.asarray(x, dtype=complex)


def identity_functor(c: FiniteCStarCategory) -> StarFunctor:
    return StarFunctor(c, c, {a: a for a in c.objects}, {pair: np.eye(c.dim(*pair), dtype=complex) for pair in c.pairs()})


def compose_star_functors(first: StarFunctor, second: StarFunctor) -> StarFunctor:
    """``second ∘ first``."""
    if not categories_equal(first.target, second.source):
        raise InvalidFunctor("functors are not composable: target and source differ")
    obj_map = {a: second.obj_map[first.obj_map[a]] for a in first.source.objects}
    hom_maps = {(a, b): second.hom_maps[first.target_pair(a, b)] @ first.hom_maps[(a, b)] for a, b in first.source.pairs()}
    return StarFunctor(first.source, second.target, obj_map, hom_maps)


def invert_star_functor(functor: StarFunctor, tol: Optional[Tolerance] = None) -> StarFunctor:
    tol = Tolerance.coerce(tol)
    inverse_objects = {b: a for a, b in functor.obj_map.items()}
    hom_maps = {}
    for a, b in functor.source.pairs():
        m = functor.hom_maps[(a, b)]
        if m.shape[0] != m.shape[1]:
            raise InvalidFunctor(f"hom map on {a}|{b} is not square", witness={"pair": [a, b]})
        hom_maps[functor.target_pair(a, b)] = np.linalg.inv(m) if m.size else m.copy()
    return StarFunctor(functor.target, functor.source, inverse_objects, hom_maps)


def check_star_functor(functor: StarFunctor, tol: Optional[Tolerance] = None) -> ValidationReport:
    tol = Tolerance.coerce(tol)
    src, dst = functor.source, functor.target
    report = ValidationReport(subject="star functor")

    report.record("object_bijective")
    if sorted(functor.obj_map) != sorted(src.objects) or sorted(functor.obj_map.values()) != sorted(dst.objects):
        report.fail("object_bijective", "object map is not a bijection", mapping=dict(functor.obj_map))
        return report
    for a, b in src.pairs():
        expected = (dst.dim(*functor.target_pair(a, b)), src.dim(a, b))
        if functor.hom_maps[(a, b)].shape != expected:
            report.fail("object_bijective", f"hom map on {a}|{b} has shape {functor.hom_maps[(a, b)].shape}", pair=[a, b])
    if not report.valid:
        return report

    report.record("functorial")
    for a, b, d in product(src.objects, repeat=3):
        t = src.comp[(a, b, d)]
        if not t.size:
            continue
        fa, fb, fd = (functor.obj_map[o] for o in (a, b, d))
        lhs = np.einsum("ijk,lk->ijl", t, functor.hom_maps[(a, d)])
        rhs = np.einsum("xi,yj,xyl->ijl", functor.hom_maps[(a, b)], functor.hom_maps[(b, d)], dst.comp[(fa, fb, fd)])
        diff = np.abs(lhs - rhs)
        deviation = max_abs(diff)
        if deviation > _loose(max_abs(rhs)):
            i, j, _ = np.unravel_index(np.argmax(diff), diff.shape)
            report.fail("functorial", f"Φ(x∘y) ≠ Φ(x)∘Φ(y) on {a}{b}{d}", deviation, objects=[a, b, d], basis=[int(i), int(j)])

    report.record("unital")
    for a in src.objects:
        deviation = max_abs(functor.apply(a, a, src.unit[a]) - dst.unit[functor.obj_map[a]])
        if deviation > _loose():
            report.fail("unital", f"Φ(ι_{a}) ≠ ι_{functor.obj_map[a]}", deviation, object=a)

    report.record("involutive")
    for a, b in src.pairs():
        n = src.dim(a, b)
        if not n:
            continue
        lhs = functor.hom_maps[(b, a)] @ src.invol[(a, b)]
        rhs = dst.invol[functor.target_pair(a, b)] @ np.conj(functor.hom_maps[(a, b)])
        deviation = max_abs(lhs - rhs)
        if deviation > _loose(max_abs(rhs)):
            report.fail("involutive", f"Φ(x*) ≠ Φ(x)* on C_{a}{b}", deviation, pair=[a, b])
    return report


def check_non_degenerate(functor: StarFunctor, tol: Optional[Tolerance] = None) -> NonDegeneracyResult:
    """Every point of the target's spectrum must pull back to a nonzero functional."""
    tol = Tolerance.coerce(tol)
    frame = linked_pairs(functor.target, tol)
    for a, b in functor.source.pairs():
        ta, tb = functor.target_pair(a, b)
        m = functor.hom_maps[(a, b)]
        for point in frame.linked(ta, tb):
            if ta == tb:
                covector = frame.characters[ta][point[0]]
            else:
                covector = frame.corners[(ta, tb)][point].covector
            pulled = covector @ m if m.size else np.zeros(0)
            if max_abs(pulled) <= _loose():
                block = frame.block_of(ta, point[0])
                witness = DegeneracyWitness(
                    source_pair=(a, b),
                    target_pair=(ta, tb),
                    point=point,
                    orbit_class={"characters": dict(block)},
                )
                logger.info("❌ functor degenerates on %s|%s at point %s", a, b, point)
                return NonDegeneracyResult(non_degenerate=False, witness=witness)
    return NonDegeneracyResult(non_degenerate=True)


# -------------------------------------------------
# Hilbert bimodules and linking categories
# -------------------------------------------------
@dataclass(frozen=True, eq=False)
class HilbertBimodule:
    alg_a: FiniteCStarCategory
    alg_b: FiniteCStarCategory
    module_dim: int
    left_action: np.ndarray
    right_action: np.ndarray
    ip_a: np.ndarray
    ip_b: np.ndarray
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim_a(self) -> int:
        return self.alg_a.dim(*(self.alg_a.objects[0],) * 2)

    @property
    def dim_b(self) -> int:
        return self.alg_b.dim(*(self.alg_b.objects[0],) * 2)

    def inner_a(self, x, y) -> np.ndarray:
        """_A⟨x, y⟩, linear in x."""
        return np.einsum("m,n,mnk->k", np.asarray(x, dtype=complex), np.conj(np.asarray(y, dtype=complex)), self.ip_a)

    def inner_b(self, x, y) -> np.ndarray:
        """⟨x, y⟩_B, linear in y."""
        return np.einsum("m,n,mnk->k", np.conj(np.asarray(x, dtype=complex)), np.asarray(y, dtype=complex), self.ip_b)


def algebra(dim: int, comp=None, invol=None, unit=None, name: str = "A") -> FiniteCStarCategory:
    """A one-object category (a commutative unital algebra)."""
    return FiniteCStarCategory.build(
        (name,),
        {(name, name): dim},
        {(name, name, name): comp} if comp is not None else None,
        {(name, name): invol} if invol is not None else None,
        {name: unit} if unit is not None else None,
    )


def function_algebra(points: int, name: str = "A") -> FiniteCStarCategory:
    """C(X) for a finite X, in the basis of indicator functions."""
    comp = np.zeros((points, points, points), dtype=complex)
    for i in range(points):
        comp[i, i, i] = 1.0
    return algebra(points, comp, np.eye(points), np.ones(points), name)


def _positive_forms(characters: np.ndarray, tensor: np.ndarray) -> list[np.ndarray]:
    return [np.einsum("mnk,k->mn", tensor, chi) for chi in characters]


def validate_hilbert_bimodule(m: HilbertBimodule, tol: Optional[Tolerance] = None) -> ValidationReport:
    tol = Tolerance.coerce(tol)
    report = ValidationReport(subject="hilbert bimodule")
    da, db, dm = m.dim_a, m.dim_b, m.module_dim
    shapes = {
        "left_action": (m.left_action, (da, dm, dm)),
        "right_action": (m.right_action, (dm, db, dm)),
        "ip_a": (m.ip_a, (dm, dm, da)),
        "ip_b": (m.ip_b, (dm, dm, db)),
    }
    report.record("structure")
    for name, (arr, shape) in shapes.items():
        if arr.shape != shape:
            report.fail("structure", f"{name} has shape {arr.shape}, expected {shape}", field=name)
    if not report.valid:
        return report
    bound = _strict(tol, max(max_abs(m.ip_a), max_abs(m.ip_b), 1.0) ** 2) * 10

    report.record("compatibility")
    if dm:
        lhs = np.einsum("mna,apl->mnpl", m.ip_a, m.left_action)
        rhs = np.einsum("npb,mbl->mnpl", m.ip_b, m.right_action)
        diff = np.abs(lhs - rhs)
        deviation = max_abs(diff)
        if deviation > bound:
            i, j, k, _ = np.unravel_index(np.argmax(diff), diff.shape)
            report.fail("compatibility", "_A⟨x,y⟩·z ≠ x·⟨y,z⟩_B", deviation, basis=[int(i), int(j), int(k)])

    report.record("hermitian")
    ja = m.alg_a.invol[(m.alg_a.objects[0],) * 2]
    jb = m.alg_b.invol[(m.alg_b.objects[0],) * 2]
    for label, tensor, j in (("A", m.ip_a, ja), ("B", m.ip_b, jb)):
        if not dm:
            continue
        adjoint = np.einsum("kl,mnl->mnk", j, np.conj(tensor))
        deviation = max_abs(adjoint - tensor.transpose(1, 0, 2))
        if deviation > bound:
            report.fail("hermitian", f"inner product with values in {label} is not hermitian", deviation, side=label)

    report.record("positivity")
    for label, alg, tensor in (("A", m.alg_a, m.ip_a), ("B", m.alg_b, m.ip_b)):
        if not dm:
            continue
        try:
            chars = character_matrix(alg, alg.objects[0], tol)
        except DiagonalNotSemisimple as exc:
            report.fail("positivity", exc.detail, side=label)
            continue
        for q, form in enumerate(_positive_forms(chars, tensor)):
            form = 0.5 * (form + form.conj().T)
            values, _ = hermitian_eig(form, Tolerance(max(tol.abs_eps, settings.POSITIVITY_EPS), tol.rel_eps))
            if values.size and values[0] < -settings.POSITIVITY_EPS * (1.0 + abs(values[-1])):
                report.fail("positivity", f"⟨x,x⟩ is not positive in {label}", float(-values[0]), side=label, character=q)
    return report


def bimodule_norm(m: HilbertBimodule, x, tol: Optional[Tolerance] = None) -> float:
    """‖x‖ with ‖x‖² = ‖⟨x,x⟩_B‖; equals ‖_A⟨x,x⟩‖ for a valid bimodule."""
    tol = Tolerance.coerce(tol)
    b = m.alg_b.objects[0]
    return float(np.sqrt(cstar_norm(m.alg_b, b, b, m.inner_b(x, x), tol)))


def linking_category(m: HilbertBimodule, tol: Optional[Tolerance] = None) -> FiniteCStarCategory:
    """The two-object category [[algA, M], [M*, algB]]."""
    tol = Tolerance.coerce(tol)
    key = ("linking", tol)
    if key in m._memo:
        return m._memo[key]
    report = validate_hilbert_bimodule(m, tol)
    if not report.valid:
        raise BimoduleAxiomViolation("bimodule axioms fail", witness=[f.model_dump() for f in report.failures])

    a_obj, b_obj = m.alg_a.objects[0], m.alg_b.objects[0]
    ja = m.alg_a.invol[(a_obj, a_obj)]
    jb = m.alg_b.invol[(b_obj, b_obj)]
    da, db, dm = m.dim_a, m.dim_b, m.module_dim
    dims = {("A", "A"): da, ("B", "B"): db, ("A", "B"): dm, ("B", "A"): dm}
    comp = {
        ("A", "A", "A"): m.alg_a.comp[(a_obj, a_obj, a_obj)],
        ("B", "B", "B"): m.alg_b.comp[(b_obj, b_obj, b_obj)],
        ("A", "A", "B"): m.left_action,
        ("A", "B", "B"): m.right_action,
        ("A", "B", "A"): m.ip_a,
        ("B", "A", "B"): m.ip_b,
        # n*∘a = (a*∘n)* and b∘n* = (n∘b*)*
        ("B", "A", "A"): np.conj(np.einsum("jk,jnl->nkl", ja, m.left_action)) if dm else None,
        ("B", "B", "A"): np.conj(np.einsum("jk,njl->knl", jb, m.right_action)) if dm else None,
    }
    invol = {("A", "A"): ja, ("B", "B"): jb, ("A", "B"): np.eye(dm), ("B", "A"): np.eye(dm)}
    unit = {"A": m.alg_a.unit[a_obj], "B": m.alg_b.unit[b_obj]}
    linked = FiniteCStarCategory.build(("A", "B"), dims, {k: v for k, v in comp.items() if v is not None}, invol, unit)

    report = validate_category(linked, tol)
    if not report.valid:
        raise BimoduleAxiomViolation("linking category is not a C*-category", witness=[f.model_dump() for f in report.failures])
    m._memo[key] = linked
    return linked
