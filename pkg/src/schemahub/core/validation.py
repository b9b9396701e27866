"""Well-formedness checks, feature lookup and frame-condition equality."""
from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, FrozenSet, Iterable, List, Optional, Tuple

from .errors import UnknownType
from .model import (
    Aggregate,
    Attribute,
    Feature,
    RangeConstraint,
    Reference,
    Schema,
    SchemaType,
    TypeKind,
)

# rule names, shared with tests and the property validator
SOME_TYPES = "some entities or relationships"
UNIQUE_ENTITY_NAMES = "unique entity names"
UNIQUE_RELATIONSHIP_NAMES = "unique relationship names"
SOME_ROOT = "some root entity"
REFS_TO_ENTITIES = "refsTo in entities"
AGGREGATES_NON_ROOT = "aggregates non-root entity"
VARIATIONS_NON_EMPTY = "variations non-empty"
VARIATION_IDS = "distinct positive variation ids"
COMMON_DISJOINT = "common and variation features disjoint"
UNIQUE_FEATURE_NAMES = "unique feature names"
KEY_ON_ATTRIBUTES = "key only on attributes"
REFERENCE_VALUE_XOR_ATTRIBUTES = "reference valueType xor attributes"
RANGE_ORDERED = "range min <= max"
RELATIONSHIP_NOT_ROOT = "relationship types are never root"
AGGREGATES_ACYCLIC = "aggregates acyclic"


@dataclass(frozen=True)
class Violation:
    rule: str
    path: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.path}"


def validate(schema: Schema) -> List[Violation]:
    out: List[Violation] = []
    if not schema.entity_types and not schema.relationship_types:
        out.append(Violation(SOME_TYPES, schema.name))

    for rule, seq in ((UNIQUE_ENTITY_NAMES, schema.entity_types),
                      (UNIQUE_RELATIONSHIP_NAMES, schema.relationship_types)):
        seen = set()
        for t in seq:
            if t.name in seen:
                out.append(Violation(rule, t.name))
            seen.add(t.name)

    if schema.entity_types and not any(e.root for e in schema.entity_types):
        out.append(Violation(SOME_ROOT, schema.name))

    entities = {e.name: e for e in schema.entity_types}
    for t in schema.types():
        out.extend(_check_type(t, entities))
    out.extend(_check_embedding(schema))
    return out


def _check_embedding(schema: Schema) -> List[Violation]:
    """An entity may not end up embedded in itself."""
    edges = {e.name: [f.target for f in e.all_features() if isinstance(f, Aggregate)]
             for e in schema.entity_types}
    out: List[Violation] = []
    done: set = set()

    def visit(name: str, trail: List[str]):
        if name in trail:
            cycle = trail[trail.index(name):] + [name]
            out.append(Violation(AGGREGATES_ACYCLIC, " -> ".join(cycle)))
            return
        if name in done or name not in edges:
            return
        for target in edges[name]:
            visit(target, trail + [name])
        done.add(name)

    for name in edges:
        visit(name, [])
    return out


def _check_type(t: SchemaType, entities) -> List[Violation]:
    out: List[Violation] = []
    if t.kind is TypeKind.RELATIONSHIP and t.root:
        out.append(Violation(RELATIONSHIP_NOT_ROOT, t.name))
    if not t.variations:
        out.append(Violation(VARIATIONS_NON_EMPTY, t.name))

    ids = [v.var_id for v in t.variations]
    if len(set(ids)) != len(ids) or any(i < 1 for i in ids):
        out.append(Violation(VARIATION_IDS, t.name))

    common_names = {f.name for f in t.common}
    if len(common_names) != len(t.common):
        out.append(Violation(UNIQUE_FEATURE_NAMES, f"{t.name}.common"))

    added: dict = {}
    for v in t.variations:
        names = v.names
        if len(set(names)) != len(names):
            out.append(Violation(UNIQUE_FEATURE_NAMES, f"{t.name}.v{v.var_id}"))
        for f in v.features:
            if f.name in common_names:
                out.append(Violation(COMMON_DISJOINT, f"{t.name}.v{v.var_id}.{f.name}"))
            prior = added.get(f.name)
            if prior is not None and prior != f:
                out.append(Violation(UNIQUE_FEATURE_NAMES, f"{t.name}.{f.name}"))
            added.setdefault(f.name, f)

    located = [(f"{t.name}.{f.name}", f) for f in t.common]
    located += [(f"{t.name}.v{v.var_id}.{f.name}", f) for v in t.variations for f in v.features]
    for path, f in located:
        out.extend(_check_feature(path, f, entities))
    return out


def _check_feature(path: str, f: Feature, entities) -> List[Violation]:
    out: List[Violation] = []
    if isinstance(f, Attribute):
        if isinstance(f.constraint, RangeConstraint) and f.constraint.min > f.constraint.max:
            out.append(Violation(RANGE_ORDERED, path))
        return out
    if getattr(f, "key", False):
        out.append(Violation(KEY_ON_ATTRIBUTES, path))
    if isinstance(f, Reference):
        if f.target not in entities:
            out.append(Violation(REFS_TO_ENTITIES, path))
        if f.value_type is not None and f.attributes:
            out.append(Violation(REFERENCE_VALUE_XOR_ATTRIBUTES, path))
        for a in f.attributes:
            out.extend(_check_feature(f"{path}.{a.name}", a, entities))
    elif isinstance(f, Aggregate):
        target = entities.get(f.target)
        if target is None or target.root:
            out.append(Violation(AGGREGATES_NON_ROOT, path))
    return out


def features_of(schema: Schema, type_name: str) -> List[Feature]:
    """F^t: common features plus every variation's additions, one per name."""
    t = schema.find_type(type_name)
    if t is None:
        raise UnknownType(type_name)
    return t.all_features()


# ----------------------------------------------------------------- equality

def type_fingerprint(t: SchemaType) -> Tuple:
    """Order-insensitive for feature sets, order-sensitive for variation lists."""
    return (
        t.kind,
        t.name,
        t.root,
        frozenset(t.common),
        tuple((v.var_id, frozenset(v.features), v.count) for v in t.variations),
    )


def schemas_equal_except(a: Schema, b: Schema, excluded: Optional[AbstractSet[str]] = None) -> bool:
    skip = set(excluded or ())
    left = {t.name: t for t in a.types() if t.name not in skip}
    right = {t.name: t for t in b.types() if t.name not in skip}
    if left.keys() != right.keys():
        return False
    return all(type_fingerprint(left[n]) == type_fingerprint(right[n]) for n in left)


def schema_fingerprint(schema: Schema) -> FrozenSet:
    return frozenset(type_fingerprint(t) for t in schema.types())


def feature_names(features: Iterable[Feature]) -> List[str]:
    return [f.name for f in features]
