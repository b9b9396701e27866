"""U-Schema: the unified logical schema model.

A Schema holds entity types and (for graph stores) relationship types. Each
schema type carries its common features once and an ordered list of
structural variations holding the features each variation adds. Every value
here is an immutable dataclass; operations build new values with
``dataclasses.replace`` instead of mutating.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

from .errors import UnknownType, UnknownVariation

UNBOUNDED = -1


class ScalarType(str, enum.Enum):
    STRING = "String"
    INTEGER = "Integer"
    DOUBLE = "Double"
    BOOLEAN = "Boolean"
    TIMESTAMP = "Timestamp"
    IDENTIFIER = "Identifier"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SetType:
    element: "DataType"


@dataclass(frozen=True)
class ListType:
    element: "DataType"


@dataclass(frozen=True)
class MapType:
    key: "DataType"
    value: "DataType"


@dataclass(frozen=True)
class TupleType:
    elements: Tuple["DataType", ...]


DataType = Union[ScalarType, SetType, ListType, MapType, TupleType]


def is_scalar(t: DataType) -> bool:
    return isinstance(t, ScalarType)


def render_type(t: DataType) -> str:
    """Athena spelling of a data type."""
    if isinstance(t, ScalarType):
        return t.value
    if isinstance(t, ListType):
        return f"List<{render_type(t.element)}>"
    if isinstance(t, SetType):
        return f"Set<{render_type(t.element)}>"
    if isinstance(t, MapType):
        return f"Map<{render_type(t.key)},{render_type(t.value)}>"
    return "Tuple<" + ",".join(render_type(e) for e in t.elements) + ">"


@dataclass(frozen=True)
class Cardinality:
    lower: int = 1
    upper: int = 1

    def __post_init__(self):
        if (self.lower, self.upper) not in LEGAL_CARDINALITIES:
            raise ValueError(f"illegal cardinality ({self.lower}, {self.upper})")

    @property
    def many(self) -> bool:
        return self.upper == UNBOUNDED

    @property
    def symbol(self) -> str:
        return _CARD_SYMBOLS[(self.lower, self.upper)]

    @classmethod
    def from_symbol(cls, symbol: str) -> "Cardinality":
        lower, upper = _SYMBOL_CARDS[symbol]
        return cls(lower, upper)

    def __str__(self) -> str:
        upper = "-1" if self.upper == UNBOUNDED else str(self.upper)
        return f"({self.lower}, {upper})"


LEGAL_CARDINALITIES = {(0, 1), (1, 1), (0, UNBOUNDED), (1, UNBOUNDED)}
_CARD_SYMBOLS = {(0, 1): "?", (1, 1): "&", (0, UNBOUNDED): "*", (1, UNBOUNDED): "+"}
_SYMBOL_CARDS = {v: k for k, v in _CARD_SYMBOLS.items()}
CARDINALITY_SYMBOLS = tuple(_SYMBOL_CARDS)


@dataclass(frozen=True)
class RegexConstraint:
    pattern: str


@dataclass(frozen=True)
class RangeConstraint:
    min: int
    max: int


Constraint = Union[RegexConstraint, RangeConstraint]


# ---------------------------------------------------------------- features

@dataclass(frozen=True)
class Attribute:
    name: str
    type: DataType
    key: bool = False
    optional: bool = False
    constraint: Optional[Constraint] = None


@dataclass(frozen=True)
class Reference:
    name: str
    target: str
    cardinality: Cardinality = Cardinality()
    optional: bool = False
    value_type: Optional[ScalarType] = None
    attributes: Tuple[Attribute, ...] = ()


@dataclass(frozen=True)
class Aggregate:
    name: str
    target: str
    cardinality: Cardinality = Cardinality()
    optional: bool = False


Feature = Union[Attribute, Reference, Aggregate]


def feature_kind(f: Feature) -> str:
    if isinstance(f, Attribute):
        return "attribute"
    if isinstance(f, Reference):
        return "reference"
    return "aggregate"


def renamed(f: Feature, name: str) -> Feature:
    return replace(f, name=name)


# ------------------------------------------------------------ schema types

@dataclass(frozen=True)
class StructuralVariation:
    var_id: int
    features: Tuple[Feature, ...] = ()
    count: Optional[int] = None

    def feature(self, name: str) -> Optional[Feature]:
        for f in self.features:
            if f.name == name:
                return f
        return None

    @property
    def names(self) -> List[str]:
        return [f.name for f in self.features]


class TypeKind(str, enum.Enum):
    ENTITY = "ENTITY"
    RELATIONSHIP = "RELATIONSHIP"


@dataclass(frozen=True)
class SchemaType:
    name: str
    common: Tuple[Feature, ...] = ()
    variations: Tuple[StructuralVariation, ...] = (StructuralVariation(1),)

    kind = TypeKind.ENTITY

    @property
    def root(self) -> bool:
        return False

    def all_features(self) -> List[Feature]:
        """F^t in declaration order: common features, then each variation's
        additions in variation order; first occurrence of a name wins."""
        seen: Dict[str, Feature] = {}
        for f in self.common:
            seen.setdefault(f.name, f)
        for v in self.variations:
            for f in v.features:
                seen.setdefault(f.name, f)
        return list(seen.values())

    def feature(self, name: str) -> Optional[Feature]:
        for f in self.all_features():
            if f.name == name:
                return f
        return None

    def has_feature(self, name: str) -> bool:
        return self.feature(name) is not None

    def common_feature(self, name: str) -> Optional[Feature]:
        for f in self.common:
            if f.name == name:
                return f
        return None

    def variation(self, var_id: int) -> StructuralVariation:
        for v in self.variations:
            if v.var_id == var_id:
                return v
        raise UnknownVariation(self.name, var_id)

    def has_variation(self, var_id: int) -> bool:
        return any(v.var_id == var_id for v in self.variations)

    def variation_features(self, var_id: int) -> List[Feature]:
        """Full feature list of one variation: common ∪ added."""
        return list(self.common) + list(self.variation(var_id).features)

    def key_attributes(self) -> List[Attribute]:
        return [f for f in self.all_features() if isinstance(f, Attribute) and f.key]

    def key_attribute(self) -> Optional[Attribute]:
        keys = self.key_attributes()
        return keys[0] if keys else None

    def map_features(self, fn) -> "SchemaType":
        """Apply ``fn(feature) -> feature`` to every feature, common and per variation."""
        return replace(
            self,
            common=tuple(fn(f) for f in self.common),
            variations=tuple(
                replace(v, features=tuple(fn(f) for f in v.features)) for v in self.variations
            ),
        )


@dataclass(frozen=True)
class EntityType(SchemaType):
    is_root: bool = True

    kind = TypeKind.ENTITY

    @property
    def root(self) -> bool:
        return self.is_root


@dataclass(frozen=True)
class RelationshipType(SchemaType):
    kind = TypeKind.RELATIONSHIP


def single_variation(name: str, features: Iterable[Feature], kind: TypeKind = TypeKind.ENTITY,
                     root: bool = True) -> SchemaType:
    """A type with every feature common and one empty variation."""
    feats = tuple(features)
    if kind is TypeKind.RELATIONSHIP:
        return RelationshipType(name=name, common=feats)
    return EntityType(name=name, common=feats, is_root=root)


# ------------------------------------------------------------------ schema

@dataclass(frozen=True)
class Schema:
    name: str
    version: int = 1
    entity_types: Tuple[EntityType, ...] = ()
    relationship_types: Tuple[RelationshipType, ...] = ()

    def types(self) -> Iterator[SchemaType]:
        yield from self.entity_types
        yield from self.relationship_types

    @property
    def type_names(self) -> List[str]:
        return [t.name for t in self.types()]

    def has_type(self, name: str) -> bool:
        return any(t.name == name for t in self.types())

    def find_type(self, name: str) -> Optional[SchemaType]:
        for t in self.types():
            if t.name == name:
                return t
        return None

    def get_type(self, name: str) -> SchemaType:
        t = self.find_type(name)
        if t is None:
            raise UnknownType(name)
        return t

    def entity(self, name: str) -> Optional[EntityType]:
        for t in self.entity_types:
            if t.name == name:
                return t
        return None

    def relationship(self, name: str) -> Optional[RelationshipType]:
        for t in self.relationship_types:
            if t.name == name:
                return t
        return None

    def with_type(self, new: SchemaType, replacing: Optional[str] = None) -> "Schema":
        """Replace the type named ``replacing`` (default: ``new.name``) in place,
        or append ``new`` when no such type exists."""
        old = replacing or new.name
        ents, rels = list(self.entity_types), list(self.relationship_types)
        for seq in (ents, rels):
            for i, t in enumerate(seq):
                if t.name == old:
                    if t.kind is new.kind:
                        seq[i] = new
                        return replace(self, entity_types=tuple(ents), relationship_types=tuple(rels))
                    del seq[i]
                    break
        if new.kind is TypeKind.ENTITY:
            ents.append(new)
        else:
            rels.append(new)
        return replace(self, entity_types=tuple(ents), relationship_types=tuple(rels))

    def without_types(self, *names: str) -> "Schema":
        drop = set(names)
        return replace(
            self,
            entity_types=tuple(t for t in self.entity_types if t.name not in drop),
            relationship_types=tuple(t for t in self.relationship_types if t.name not in drop),
        )

    def splice(self, name: str, *news: SchemaType) -> "Schema":
        """Replace type ``name`` by ``news``; same-kind replacements take its position."""
        ents, rels = list(self.entity_types), list(self.relationship_types)
        for seq, kind in ((ents, TypeKind.ENTITY), (rels, TypeKind.RELATIONSHIP)):
            idx = next((i for i, t in enumerate(seq) if t.name == name), None)
            same = [n for n in news if n.kind is kind]
            if idx is None:
                seq.extend(same)
            else:
                seq[idx:idx + 1] = same
        return replace(self, entity_types=tuple(ents), relationship_types=tuple(rels))

    def retarget(self, old: str, new: str) -> "Schema":
        """Point every reference and aggregate naming ``old`` at ``new``."""
        def fix(f: Feature) -> Feature:
            if isinstance(f, (Reference, Aggregate)) and f.target == old:
                return replace(f, target=new)
            return f
        return self.map_types(lambda t: t.map_features(fix))

    def map_types(self, fn) -> "Schema":
        return replace(
            self,
            entity_types=tuple(fn(t) for t in self.entity_types),
            relationship_types=tuple(fn(t) for t in self.relationship_types),
        )

    def bump(self) -> "Schema":
        return replace(self, version=self.version + 1)

    def types_targeting(self, name: str) -> List[str]:
        """Names of types owning a reference or aggregate whose target is ``name``."""
        out = []
        for t in self.types():
            for f in t.all_features():
                if isinstance(f, (Reference, Aggregate)) and f.target == name:
                    out.append(t.name)
                    break
        return out

    def aggregators_of(self, name: str) -> List[Tuple[str, Aggregate]]:
        """(owner type, aggregate) pairs embedding instances of ``name``."""
        out = []
        for t in self.types():
            for f in t.all_features():
                if isinstance(f, Aggregate) and f.target == name:
                    out.append((t.name, f))
        return out
