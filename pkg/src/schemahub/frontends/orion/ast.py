"""Orion change scripts: one ChangeOp per statement, in source order."""
import enum
from dataclasses import dataclass, fields
from typing import Optional, Tuple

from ...core.model import Attribute, Cardinality, Feature, ScalarType, TypeKind


class OpCategory(str, enum.Enum):
    SCHEMA_TYPE = "schema type"
    VARIATION = "variation"
    FEATURE = "feature"
    ATTRIBUTE = "attribute"
    REFERENCE = "reference"
    AGGREGATE = "aggregate"


class OpKind(str, enum.Enum):
    ADD_TYPE = "add_type"
    DELETE_TYPE = "delete_type"
    RENAME_TYPE = "rename_type"
    EXTRACT_TYPE = "extract_type"
    SPLIT_TYPE = "split_type"
    MERGE_TYPE = "merge_type"
    DELVAR = "delvar"
    ADAPT = "adapt"
    UNION = "union"
    DELETE_FEATURE = "delete_feature"
    RENAME_FEATURE = "rename_feature"
    COPY_FEATURE = "copy_feature"
    MOVE_FEATURE = "move_feature"
    NEST_FEATURE = "nest_feature"
    UNNEST_FEATURE = "unnest_feature"
    ADD_ATTR = "add_attr"
    CAST_ATTR = "cast_attr"
    PROMOTE_ATTR = "promote_attr"
    DEMOTE_ATTR = "demote_attr"
    ADD_REF = "add_ref"
    CAST_REF = "cast_ref"
    MULT_REF = "mult_ref"
    MORPH_REF = "morph_ref"
    ADD_AGGR = "add_aggr"
    MULT_AGGR = "mult_aggr"
    MORPH_AGGR = "morph_aggr"

    @property
    def category(self) -> OpCategory:
        return _CATEGORIES[self]


_CATEGORIES = {
    **{k: OpCategory.SCHEMA_TYPE for k in (OpKind.ADD_TYPE, OpKind.DELETE_TYPE, OpKind.RENAME_TYPE,
                                           OpKind.EXTRACT_TYPE, OpKind.SPLIT_TYPE, OpKind.MERGE_TYPE)},
    **{k: OpCategory.VARIATION for k in (OpKind.DELVAR, OpKind.ADAPT, OpKind.UNION)},
    **{k: OpCategory.FEATURE for k in (OpKind.DELETE_FEATURE, OpKind.RENAME_FEATURE, OpKind.COPY_FEATURE,
                                       OpKind.MOVE_FEATURE, OpKind.NEST_FEATURE, OpKind.UNNEST_FEATURE)},
    **{k: OpCategory.ATTRIBUTE for k in (OpKind.ADD_ATTR, OpKind.CAST_ATTR, OpKind.PROMOTE_ATTR,
                                         OpKind.DEMOTE_ATTR)},
    **{k: OpCategory.REFERENCE for k in (OpKind.ADD_REF, OpKind.CAST_REF, OpKind.MULT_REF, OpKind.MORPH_REF)},
    **{k: OpCategory.AGGREGATE for k in (OpKind.ADD_AGGR, OpKind.MULT_AGGR, OpKind.MORPH_AGGR)},
}

# kinds whose statement names a schema type directly rather than through a selector
TYPE_LEVEL = frozenset(k for k, c in _CATEGORIES.items()
                       if c in (OpCategory.SCHEMA_TYPE, OpCategory.VARIATION))


@dataclass(frozen=True)
class FeatureSelector:
    type_name: Optional[str]
    features: Tuple[str, ...]
    variations: Tuple[int, ...] = ()

    def __post_init__(self):
        if not self.features:
            raise ValueError("selector names no features")
        if self.type_name is None and self.variations:
            raise ValueError("wildcard selector cannot carry variation ids")

    @property
    def wildcard(self) -> bool:
        return self.type_name is None

    @property
    def feature(self) -> str:
        return self.features[0]

    def __str__(self) -> str:
        head = "*" if self.wildcard else self.type_name
        if self.variations:
            head += "(" + ",".join(f"v{v}" for v in self.variations) + ")"
        return f"{head}::" + ", ".join(self.features)


@dataclass(frozen=True)
class JoinCondition:
    source_feature: str
    target_feature: str

    def __post_init__(self):
        if not self.source_feature or not self.target_feature:
            raise ValueError("join condition needs both feature names")


@dataclass(frozen=True)
class SplitPart:
    name: str
    features: Tuple[str, ...]


@dataclass(frozen=True)
class ChangeOp:
    kind: OpKind
    flavor: TypeKind = TypeKind.ENTITY
    type_names: Tuple[str, ...] = ()
    selector: Optional[FeatureSelector] = None
    new_name: Optional[str] = None
    target_type: Optional[str] = None
    aggregate: Optional[str] = None
    scalar: Optional[ScalarType] = None
    cardinality: Optional[Cardinality] = None
    feature: Optional[Feature] = None
    body: Tuple[Feature, ...] = ()
    inline: bool = False
    join: Optional[JoinCondition] = None
    variations: Tuple[int, ...] = ()
    parts: Tuple[SplitPart, ...] = ()
    root: bool = True

    def __post_init__(self):
        for name in _REQUIRED.get(self.kind, ()):
            value = getattr(self, name)
            if value is None or value == ():
                raise ValueError(f"{self.kind.value} needs {name}")
        if self.kind in (OpKind.DELVAR, OpKind.UNION) and len(self.variations) > 1:
            raise ValueError(f"{self.kind.value} takes one variation")
        if self.kind is OpKind.ADAPT and len(self.variations) != 2:
            raise ValueError("adapt takes two variation ids")
        if self.kind is OpKind.MERGE_TYPE and len(self.type_names) != 2:
            raise ValueError("merge takes two schema types")
        if self.kind is OpKind.SPLIT_TYPE and len(self.parts) != 2:
            raise ValueError("split takes two parts")
        if self.kind is OpKind.ADD_ATTR and not isinstance(self.feature, Attribute):
            raise ValueError("add_attr needs an attribute")

    @property
    def category(self) -> OpCategory:
        return self.kind.category

    @property
    def type_name(self) -> Optional[str]:
        if self.type_names:
            return self.type_names[0]
        return self.selector.type_name if self.selector else None

    def describe(self) -> str:
        set_fields = [f.name for f in fields(self)
                      if f.name != "kind" and getattr(self, f.name) not in (None, (), False)]
        return f"{self.kind.value}({', '.join(set_fields)})"


_REQUIRED = {
    OpKind.ADD_TYPE: ("type_names",),
    OpKind.DELETE_TYPE: ("type_names",),
    OpKind.RENAME_TYPE: ("type_names", "new_name"),
    OpKind.EXTRACT_TYPE: ("type_names", "selector", "new_name"),
    OpKind.SPLIT_TYPE: ("type_names", "parts"),
    OpKind.MERGE_TYPE: ("type_names", "new_name"),
    OpKind.DELVAR: ("type_names", "variations"),
    OpKind.ADAPT: ("type_names", "variations"),
    OpKind.UNION: ("type_names",),
    OpKind.DELETE_FEATURE: ("selector",),
    OpKind.RENAME_FEATURE: ("selector", "new_name"),
    OpKind.COPY_FEATURE: ("selector", "target_type", "new_name"),
    OpKind.MOVE_FEATURE: ("selector", "target_type", "new_name"),
    OpKind.NEST_FEATURE: ("selector", "aggregate"),
    OpKind.UNNEST_FEATURE: ("selector", "aggregate"),
    OpKind.ADD_ATTR: ("selector", "feature"),
    OpKind.CAST_ATTR: ("selector", "scalar"),
    OpKind.PROMOTE_ATTR: ("selector",),
    OpKind.DEMOTE_ATTR: ("selector",),
    OpKind.ADD_REF: ("selector", "feature"),
    OpKind.CAST_REF: ("selector", "scalar"),
    OpKind.MULT_REF: ("selector", "cardinality"),
    OpKind.MORPH_REF: ("selector",),
    OpKind.ADD_AGGR: ("selector", "feature"),
    OpKind.MULT_AGGR: ("selector", "cardinality"),
    OpKind.MORPH_AGGR: ("selector",),
}


@dataclass(frozen=True)
class ChangeScript:
    name: str
    using: Tuple[str, int]
    ops: Tuple[ChangeOp, ...] = ()

    def __len__(self) -> int:
        return len(self.ops)
