"""Taxonomy preconditions, stated over the schema alone.

The property validator picks operations with ``precondition_holds`` and
then hands them to the engine under test, so this module must not call
into the engine. The engine's own well-formedness guard is a stronger
precondition; operations it rejects for that reason are findings, not
failures.
"""
from typing import Callable, Dict, Optional, Sequence

from ..core.model import Aggregate, Attribute, Reference, ScalarType, Schema, SchemaType, TypeKind, renamed
from ..frontends.orion.ast import ChangeOp, OpCategory, OpKind

# kinds whose selectors may carry a variation list
SCOPED = frozenset({
    OpKind.DELETE_FEATURE, OpKind.RENAME_FEATURE, OpKind.CAST_ATTR, OpKind.CAST_REF,
    OpKind.MULT_REF, OpKind.MULT_AGGR,
})


def _typed(schema: Schema, name: Optional[str], flavor: Optional[TypeKind] = None) -> Optional[SchemaType]:
    t = schema.find_type(name) if name else None
    if t is None or (flavor is not None and t.kind is not flavor):
        return None
    return t


def _in_scope(t: SchemaType, scope: Sequence[int]) -> bool:
    return all(t.has_variation(v) for v in scope)


def _held_in_scope(t: SchemaType, name: str, scope: Sequence[int]) -> bool:
    if not scope or t.common_feature(name) is not None:
        return True
    return any(t.variation(v).feature(name) is not None for v in scope)


def _distinct(names: Sequence[str]) -> bool:
    return len(set(names)) == len(names)


def _target(schema: Schema, op: ChangeOp):
    """(type, feature name) for a selector naming one direct feature of one type."""
    sel = op.selector
    if sel is None or sel.wildcard or len(sel.features) != 1 or "." in sel.features[0]:
        return None, None
    if sel.variations and op.kind not in SCOPED:
        return None, None
    return schema.find_type(sel.type_name), sel.features[0]


def _joinable(schema: Schema, op: ChangeOp, origin: str, destination: str) -> bool:
    if op.join is None:
        return True
    return (schema.get_type(origin).has_feature(op.join.source_feature)
            and schema.get_type(destination).has_feature(op.join.target_feature))


# ------------------------------------------------------------ schema types

def _schema_type(schema: Schema, op: ChangeOp) -> bool:
    k, names = op.kind, op.type_names
    if k is OpKind.ADD_TYPE:
        return not schema.has_type(names[0]) and _distinct([f.name for f in op.body])
    t = _typed(schema, names[0], op.flavor)
    if t is None:
        return False
    if k is OpKind.DELETE_TYPE:
        return True
    if k is OpKind.RENAME_TYPE:
        return not schema.has_type(op.new_name)
    if k is OpKind.EXTRACT_TYPE:
        fs = op.selector.features
        return (not schema.has_type(op.new_name) and _distinct(fs)
                and all(t.has_feature(n) for n in fs))
    if k is OpKind.SPLIT_TYPE:
        a, b = op.parts
        return a.name != b.name and all(
            not schema.has_type(p.name) and _distinct(p.features) and all(t.has_feature(n) for n in p.features)
            for p in (a, b))
    if k is OpKind.MERGE_TYPE:
        other = _typed(schema, names[1], op.flavor)
        if other is None or other.name == t.name or schema.has_type(op.new_name):
            return False
        mine = {f.name: f for f in t.all_features()}
        return all(mine.get(f.name, f) == f for f in other.all_features())
    return False


# -------------------------------------------------------------- variations

def _variation(schema: Schema, op: ChangeOp) -> bool:
    t = _typed(schema, op.type_names[0], op.flavor)
    if t is None:
        return False
    if op.kind is OpKind.UNION:
        return bool(t.variations)
    source = op.variations[0]
    if not t.has_variation(source) or len(t.variations) < 2:
        return False
    if op.kind is OpKind.ADAPT:
        target = op.variations[1]
        return source != target and t.has_variation(target)
    return op.kind is OpKind.DELVAR


# ---------------------------------------------------------------- features

def _nestable(schema: Schema, op: ChangeOp) -> bool:
    sel = op.selector
    e1 = _typed(schema, sel.type_name, TypeKind.ENTITY) if not sel.wildcard else None
    ag = e1.feature(op.aggregate) if e1 is not None else None
    if not isinstance(ag, Aggregate):
        return False
    e2 = _typed(schema, ag.target, TypeKind.ENTITY)
    if e2 is None:
        return False
    nesting = op.kind is OpKind.NEST_FEATURE
    if not nesting and ag.cardinality.many:
        return False
    outer = {f.name for f in e1.all_features()}
    inner = {f.name for f in e2.all_features()}
    src, dst = (outer, inner) if nesting else (inner, outer)
    for name in sel.features:
        if "." in name or name not in src or name == ag.name or name in dst:
            return False
        src.discard(name)
        dst.add(name)
    return True


def _feature(schema: Schema, op: ChangeOp) -> bool:
    k = op.kind
    if k in (OpKind.NEST_FEATURE, OpKind.UNNEST_FEATURE):
        return _nestable(schema, op)
    t, name = _target(schema, op)
    if t is None or not t.has_feature(name):
        return False
    if k in (OpKind.COPY_FEATURE, OpKind.MOVE_FEATURE):
        t2 = schema.find_type(op.target_type)
        return t2 is not None and not t2.has_feature(op.new_name) and _joinable(schema, op, t.name, t2.name)

    scope = op.selector.variations
    if not _in_scope(t, scope) or not _held_in_scope(t, name, scope):
        return False
    if k is OpKind.DELETE_FEATURE:
        return True
    if k is not OpKind.RENAME_FEATURE:
        return False
    new = op.new_name
    if not scope:
        return not t.has_feature(new)
    if t.common_feature(new) is not None:
        return False
    moved = renamed(t.feature(name), new)
    for v in t.variations:
        existing = v.feature(new)
        if existing is not None and (v.var_id in scope or existing != moved):
            return False
    return True


# -------------------------------------------------------------- attributes

def _attribute(schema: Schema, op: ChangeOp) -> bool:
    k, sel = op.kind, op.selector
    if k is OpKind.ADD_ATTR:
        if sel is None or sel.variations or len(sel.features) != 1 or "." in sel.features[0]:
            return False
        name = sel.features[0]
        if sel.wildcard:
            return any(not t.has_feature(name) for t in schema.types())
        t = schema.find_type(sel.type_name)
        return t is not None and not t.has_feature(name)

    if k is OpKind.CAST_ATTR and not isinstance(op.scalar, ScalarType):
        return False
    t, name = _target(schema, op)
    at = t.feature(name) if t is not None else None
    if not isinstance(at, Attribute):
        return False
    if k is OpKind.CAST_ATTR:
        return _in_scope(t, sel.variations)
    if k is OpKind.PROMOTE_ATTR:
        return t.kind is TypeKind.ENTITY and not at.key
    if k is OpKind.DEMOTE_ATTR:
        return at.key
    return False


# -------------------------------------------------------------- references

def _only_referrer(schema: Schema, target: str, owner: str, name: str) -> bool:
    return not any(isinstance(f, Reference) and f.target == target and (t.name, f.name) != (owner, name)
                   for t in schema.types() for f in t.all_features())


def _reference(schema: Schema, op: ChangeOp) -> bool:
    k = op.kind
    t, name = _target(schema, op)
    if t is None:
        return False
    if k is OpKind.ADD_REF:
        ref = op.feature
        return (not t.has_feature(name) and schema.entity(ref.target) is not None
                and _joinable(schema, op, ref.target, t.name))

    rf = t.feature(name)
    if not isinstance(rf, Reference):
        return False
    scope = op.selector.variations
    if k is OpKind.CAST_REF:
        return isinstance(op.scalar, ScalarType) and not rf.attributes and _in_scope(t, scope)
    if k is OpKind.MULT_REF:
        return _in_scope(t, scope)
    if k is OpKind.MORPH_REF:
        new = op.new_name or rf.name
        target = schema.entity(rf.target)
        if t.kind is not TypeKind.ENTITY or target is None:
            return False
        if new != rf.name and t.has_feature(new):
            return False
        return not target.root or _only_referrer(schema, target.name, t.name, rf.name)
    return False


# -------------------------------------------------------------- aggregates

def _aggregate(schema: Schema, op: ChangeOp) -> bool:
    k = op.kind
    e, name = _target(schema, op)
    if e is None or e.kind is not TypeKind.ENTITY:
        return False
    if k is OpKind.ADD_AGGR:
        if e.has_feature(name):
            return False
        if op.inline:
            return not schema.has_type(op.feature.target) and _distinct([f.name for f in op.body])
        dst = schema.entity(op.feature.target)
        return dst is not None and not dst.root

    ag = e.feature(name)
    if not isinstance(ag, Aggregate):
        return False
    if k is OpKind.MULT_AGGR:
        return _in_scope(e, op.selector.variations)
    if k is OpKind.MORPH_AGGR:
        new = op.new_name or ag.name
        return new == ag.name or not e.has_feature(new)
    return False


_BY_CATEGORY: Dict[OpCategory, Callable[[Schema, ChangeOp], bool]] = {
    OpCategory.SCHEMA_TYPE: _schema_type,
    OpCategory.VARIATION: _variation,
    OpCategory.FEATURE: _feature,
    OpCategory.ATTRIBUTE: _attribute,
    OpCategory.REFERENCE: _reference,
    OpCategory.AGGREGATE: _aggregate,
}


def precondition_holds(schema: Schema, op: ChangeOp) -> bool:
    return _BY_CATEGORY[op.category](schema, op)
