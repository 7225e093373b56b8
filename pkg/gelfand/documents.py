"""JSON documents: pydantic schemas and conversion to and from domain values.

Complex numbers are ``[re, im]`` pairs; arrays are nested lists of pairs.
Hom-set keys join object labels with ``|`` (``"A|B"``, ``"A|B|C"``).
"""

import json
import logging
from pathlib import Path
from typing import Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from .cstarcat import FiniteCStarCategory, HilbertBimodule, StarFunctor, algebra, function_algebra
from .exceptions import DocumentError, GelfandError
from .functors import GelfandData
from .spaceoid import FiniteSpaceoid, Point, SpaceoidMorphism

logger = logging.getLogger(__name__)

ComplexPair = tuple[float, float]


def _key(*labels: str) -> str:
    return "|".join(labels)


def _split_key(key: str, arity: int, where: str) -> tuple[str, ...]:
    parts = tuple(key.split("|"))
    if len(parts) != arity:
        raise DocumentError(f"{where}: key {key!r} must join {arity} object labels with '|'", witness={"path": where})
    return parts


def decode_array(data: Any, where: str) -> np.ndarray:
    """Nested lists of [re, im] pairs to a complex array."""
    if data is None:
        return None
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        return np.zeros(arr.shape[:-1] if arr.ndim > 1 and arr.shape[-1] == 2 else (0,), dtype=complex)
    if arr.shape[-1] != 2:
        raise DocumentError(f"{where}: complex entries must be [re, im] pairs", witness={"path": where})
    return arr[..., 0] + 1j * arr[..., 1]


def encode_array(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# -------------------------------------------------
# Schemas
# -------------------------------------------------
class CategoryDocument(BaseModel):
    kind: Literal["category"] = "category"
    objects: list[str]
    dims: dict[str, int]
    comp: dict[str, Any] = Field(default_factory=dict)
    invol: dict[str, Any] = Field(default_factory=dict)
    unit: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def labels_are_known(self):
        known = set(self.objects)
        for field_name, arity in (("dims", 2), ("comp", 3), ("invol", 2)):
            for key in getattr(self, field_name):
                parts = key.split("|")
                if len(parts) != arity or not known.issuperset(parts):
                    raise ValueError(f"{field_name}: key {key!r} does not name {arity} known objects")
        return self


class PointDocument(BaseModel):
    id: str
    t: str
    s: str
    nu: Optional[ComplexPair] = None


class PhaseDocument(BaseModel):
    p: str
    q: str
    c: ComplexPair


class SpaceoidDocument(BaseModel):
    kind: Literal["spaceoid"] = "spaceoid"
    objects: list[str]
    base_sets: dict[str, list[str]]
    points: dict[str, list[PointDocument]] = Field(default_factory=dict)
    phases: list[PhaseDocument] = Field(default_factory=list)


class MorphismDocument(BaseModel):
    kind: Literal["morphism"] = "morphism"
    source: SpaceoidDocument
    target: SpaceoidDocument
    obj_map: dict[str, str]
    base_map: dict[str, dict[str, str]]
    point_map: dict[str, str] = Field(default_factory=dict)
    scalars: dict[str, ComplexPair] = Field(default_factory=dict)


class FunctorDocument(BaseModel):
    kind: Literal["functor"] = "functor"
    source: CategoryDocument
    target: CategoryDocument
    obj_map: dict[str, str]
    hom_maps: dict[str, Any] = Field(default_factory=dict)


class AlgebraDocument(BaseModel):
    """Either ``points`` (C(X) in indicator functions) or explicit structure constants."""
    points: Optional[list[str]] = None
    dim: Optional[int] = None
    comp: Any = None
    invol: Any = None
    unit: Any = None

    @model_validator(mode="after")
    def one_presentation(self):
        if (self.points is None) == (self.dim is None):
            raise ValueError("give exactly one of 'points' or 'dim'")
        return self


class BimoduleDocument(BaseModel):
    kind: Literal["bimodule"] = "bimodule"
    alg_a: AlgebraDocument
    alg_b: AlgebraDocument
    module_dim: int = Field(ge=0)
    left_action: Any = None
    right_action: Any = None
    ip_a: Any = None
    ip_b: Any = None


Document = Union[CategoryDocument, SpaceoidDocument, MorphismDocument, FunctorDocument, BimoduleDocument]

_KINDS: dict[str, type[BaseModel]] = {
    "category": CategoryDocument,
    "spaceoid": SpaceoidDocument,
    "morphism": MorphismDocument,
    "functor": FunctorDocument,
    "bimodule": BimoduleDocument,
}


def detect_kind(raw: dict) -> str:
    if "kind" in raw:
        return raw["kind"]
    for marker, kind in (("module_dim", "bimodule"), ("hom_maps", "functor"), ("point_map", "morphism"), ("base_sets", "spaceoid"), ("dims", "category")):
        if marker in raw:
            return kind
    raise DocumentError("cannot tell what kind of document this is", witness={"keys": sorted(raw)})


# -------------------------------------------------
# Reading
# -------------------------------------------------
def parse_document(text: str, expected: Optional[str] = None) -> Document:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            witness={"line": exc.lineno, "column": exc.colno},
        ) from exc
    if not isinstance(raw, dict):
        raise DocumentError("top-level JSON value must be an object")
    kind = expected or detect_kind(raw)
    if kind not in _KINDS:
        raise DocumentError(f"unknown document kind {kind!r}", witness={"path": "kind"})
    try:
        return _KINDS[kind].model_validate(raw)
    except ValidationError as exc:
        error = exc.errors()[0]
        path = ".".join(str(part) for part in error["loc"]) or "<root>"
        raise DocumentError(f"schema violation at {path}: {error['msg']}", witness={"path": path}) from exc


def read_document(path: Union[str, Path], expected: Optional[str] = None) -> Document:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}", witness={"path": str(path)}) from exc
    logger.debug("⏳ reading %s", path)
    return parse_document(text, expected)


def write_json(path: Union[str, Path], payload: dict) -> None:
    try:
        Path(path).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot write {path}: {exc.strerror}", witness={"path": str(path)}) from exc


# -------------------------------------------------
# Documents → domain
# -------------------------------------------------
def _wrap(where: str, build):
    try:
        return build()
    except DocumentError:
        raise
    except GelfandError as exc:
        raise DocumentError(f"{where}: {exc.detail}", witness={"path": where}) from exc
    except (ValueError, TypeError) as exc:
        raise DocumentError(f"{where}: {exc}", witness={"path": where}) from exc


def to_category(doc: CategoryDocument) -> FiniteCStarCategory:
    def build():
        dims = {_split_key(k, 2, "dims"): v for k, v in doc.dims.items()}
        comp = {_split_key(k, 3, "comp"): decode_array(v, f"comp.{k}") for k, v in doc.comp.items()}
        invol = {_split_key(k, 2, "invol"): decode_array(v, f"invol.{k}") for k, v in doc.invol.items()}
        unit = {a: decode_array(v, f"unit.{a}") for a, v in doc.unit.items()}
        return FiniteCStarCategory.build(doc.objects, dims, comp, invol, unit)

    return _wrap("category", build)


def to_spaceoid(doc: SpaceoidDocument) -> FiniteSpaceoid:
    def build():
        points, nu = {}, {}
        for key, pts in doc.points.items():
            points[_split_key(key, 2, "points")] = [Point(p.id, p.t, p.s) for p in pts]
            nu.update({p.id: complex(*p.nu) for p in pts if p.nu is not None})
        phases = {(ph.p, ph.q): complex(*ph.c) for ph in doc.phases}
        return FiniteSpaceoid.build(doc.objects, doc.base_sets, points, phases, nu)

    return _wrap("spaceoid", build)


def to_morphism(doc: MorphismDocument) -> SpaceoidMorphism:
    source, target = to_spaceoid(doc.source), to_spaceoid(doc.target)
    scalars = {pid: complex(*z) for pid, z in doc.scalars.items()}
    return SpaceoidMorphism(source, target, dict(doc.obj_map), {a: dict(m) for a, m in doc.base_map.items()}, dict(doc.point_map), scalars)


def to_functor(doc: FunctorDocument) -> StarFunctor:
    source, target = to_category(doc.source), to_category(doc.target)

    def build():
        hom_maps = {_split_key(k, 2, "hom_maps"): decode_array(v, f"hom_maps.{k}") for k, v in doc.hom_maps.items()}
        return StarFunctor.build(source, target, doc.obj_map, hom_maps)

    return _wrap("functor", build)


def to_algebra(doc: AlgebraDocument, name: str) -> FiniteCStarCategory:
    if doc.points is not None:
        return function_algebra(len(doc.points), name)
    return _wrap(
        f"alg_{name.lower()}",
        lambda: algebra(doc.dim, decode_array(doc.comp, "comp"), decode_array(doc.invol, "invol"), decode_array(doc.unit, "unit"), name),
    )


def algebra_labels(doc: AlgebraDocument) -> Optional[list[str]]:
    return list(doc.points) if doc.points is not None else None


def to_bimodule(doc: BimoduleDocument) -> HilbertBimodule:
    alg_a, alg_b = to_algebra(doc.alg_a, "A"), to_algebra(doc.alg_b, "B")
    da = alg_a.dim("A", "A")
    db = alg_b.dim("B", "B")
    dm = doc.module_dim

    def tensor(value, shape, where):
        arr = _wrap(where, lambda: decode_array(value, where))
        if arr is None or (arr.size == 0 and 0 in shape):
            return np.zeros(shape, dtype=complex)
        if arr.shape != shape:
            raise DocumentError(f"{where} has shape {arr.shape}, expected {shape}", witness={"path": where})
        return arr

    return HilbertBimodule(
        alg_a,
        alg_b,
        dm,
        tensor(doc.left_action, (da, dm, dm), "left_action"),
        tensor(doc.right_action, (dm, db, dm), "right_action"),
        tensor(doc.ip_a, (dm, dm, da), "ip_a"),
        tensor(doc.ip_b, (dm, dm, db), "ip_b"),
    )


def to_domain(doc: Document):
    converters = {
        "category": to_category,
        "spaceoid": to_spaceoid,
        "morphism": to_morphism,
        "functor": to_functor,
        "bimodule": to_bimodule,
    }
    return converters[doc.kind](doc)


# -------------------------------------------------
# Domain → documents
# -------------------------------------------------
def category_document(c: FiniteCStarCategory) -> dict:
    return {
        "kind": "category",
        "objects": list(c.objects),
        "dims": {_key(a, b): c.dim(a, b) for a, b in c.pairs()},
        "comp": {_key(*k): encode_array(v) for k, v in c.comp.items() if v.size},
        "invol": {_key(*k): encode_array(v) for k, v in c.invol.items() if v.size},
        "unit": {a: encode_array(v) for a, v in c.unit.items() if v.size},
    }


def spaceoid_document(s: FiniteSpaceoid) -> dict:
    points = {}
    for (a, b), pts in s.points.items():
        if not pts:
            continue
        points[_key(a, b)] = [
            {"id": p.id, "t": p.t, "s": p.s, **({"nu": encode_complex(s.nu[p.id])} if p.id in s.nu else {})}
            for p in pts
        ]
    return {
        "kind": "spaceoid",
        "objects": list(s.objects),
        "base_sets": {a: list(xs) for a, xs in s.base_sets.items()},
        "points": points,
        "phases": [{"p": p, "q": q, "c": encode_complex(c)} for (p, q), c in s.phases.items()],
    }


def morphism_document(m: SpaceoidMorphism) -> dict:
    return {
        "kind": "morphism",
        "source": spaceoid_document(m.source),
        "target": spaceoid_document(m.target),
        "obj_map": dict(m.obj_map),
        "base_map": {a: dict(v) for a, v in m.base_map.items()},
        "point_map": dict(m.point_map),
        "scalars": {pid: encode_complex(z) for pid, z in m.scalars.items()},
    }


def functor_document(f: StarFunctor) -> dict:
    return {
        "kind": "functor",
        "source": category_document(f.source),
        "target": category_document(f.target),
        "obj_map": dict(f.obj_map),
        "hom_maps": {_key(*k): encode_array(v) for k, v in f.hom_maps.items() if v.size},
    }


def gelfand_data_document(data: GelfandData) -> dict:
    return {
        _key(*pair): {"points": list(data.point_ids[pair]), "transform": encode_array(data.transforms[pair])}
        for pair in data.transforms
        if data.transforms[pair].size
    }
