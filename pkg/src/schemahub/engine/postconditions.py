"""Per-operation postconditions and footprints.

``footprint`` names the schema types an operation may change; everything
else must compare equal before and after (the frame condition).
``check_postcondition`` asserts the operation's own effect and returns the
first violated clause, or None.
"""
from typing import Callable, Dict, Optional, Set

from ..core.model import Aggregate, Attribute, Reference, Schema
from ..core.validation import schemas_equal_except
from ..frontends.orion.ast import ChangeOp, OpKind
from .evolution import expand_selector, nest_partner


def footprint(before: Schema, op: ChangeOp) -> Set[str]:
    k = op.kind
    if k is OpKind.RENAME_TYPE:
        return {op.type_names[0], op.new_name, *before.types_targeting(op.type_names[0])}
    if k is OpKind.EXTRACT_TYPE:
        return {op.new_name}
    if k is OpKind.SPLIT_TYPE:
        return {op.type_names[0], *(p.name for p in op.parts)}
    if k is OpKind.MERGE_TYPE:
        return {*op.type_names, op.new_name}
    if op.type_names:
        return {op.type_names[0]}
    if k in (OpKind.COPY_FEATURE, OpKind.MOVE_FEATURE):
        return {t.type_name for t in expand_selector(before, op)} | {op.target_type}
    if k in (OpKind.NEST_FEATURE, OpKind.UNNEST_FEATURE):
        e1, _, e2 = nest_partner(before, op)
        return {e1.name, e2.name}
    touched = {t.type_name for t in expand_selector(before, op)}
    if k is OpKind.ADD_AGGR:
        touched.add(op.feature.target)
    if k is OpKind.MORPH_REF:
        for t in expand_selector(before, op):
            touched.add(before.get_type(t.type_name).feature(t.feature).target)
    return touched


def frame_holds(before: Schema, after: Schema, op: ChangeOp) -> bool:
    return schemas_equal_except(before, after, footprint(before, op))


def _names(schema: Schema, type_name: str) -> Set[str]:
    t = schema.find_type(type_name)
    return {f.name for f in t.all_features()} if t else set()


def _ok(cond: bool, clause: str) -> Optional[str]:
    return None if cond else clause


def _schema_type(before: Schema, after: Schema, op: ChangeOp) -> Optional[str]:
    k, names = op.kind, op.type_names
    t = names[0]
    if k is OpKind.ADD_TYPE:
        new = after.find_type(t)
        return _ok(new is not None and new.kind is op.flavor
                   and _names(after, t) == {f.name for f in op.body}, "t ∈ T ∧ t.features = fs")
    if k is OpKind.DELETE_TYPE:
        return _ok(not after.has_type(t), "t ∉ T")
    if k is OpKind.RENAME_TYPE:
        old, new = before.get_type(t), after.find_type(op.new_name)
        return _ok(new is not None and not after.has_type(t)
                   and [v.var_id for v in new.variations] == [v.var_id for v in old.variations]
                   and _names(after, op.new_name) == _names(before, t),
                   "t.name = n ∧ features preserved")
    if k is OpKind.EXTRACT_TYPE:
        return _ok(after.has_type(t) and _names(after, op.new_name) == set(op.selector.features),
                   "t ∈ T ∧ t1.features = fs")
    if k is OpKind.SPLIT_TYPE:
        a, b = op.parts
        return _ok(not after.has_type(t) and _names(after, a.name) == set(a.features)
                   and _names(after, b.name) == set(b.features), "t ∉ T ∧ t1.features = fs1 ∧ t2.features = fs2")
    if k is OpKind.MERGE_TYPE:
        union = _names(before, names[0]) | _names(before, names[1])
        return _ok(not after.has_type(names[0]) and not after.has_type(names[1])
                   and _names(after, op.new_name) == union, "t.features = t1.features ∪ t2.features")
    return "unknown schema type operation"


def _variation(before: Schema, after: Schema, op: ChangeOp) -> Optional[str]:
    old, new = before.get_type(op.type_names[0]), after.get_type(op.type_names[0])
    if op.kind in (OpKind.DELVAR, OpKind.ADAPT):
        gone = op.variations[0]
        rest = [v for v in old.variations if v.var_id != gone]
        return _ok(not new.has_variation(gone) and list(new.variations) == rest, "v1 ∉ V^t")
    added = {f.name for v in old.variations for f in v.features}
    return _ok(len(new.variations) == 1 and set(new.variations[0].names) == added
               and new.common == old.common, "V^t = {⋃ v.features}")


def _feature_in(schema: Schema, type_name: str, name: str, scope=()) -> bool:
    t = schema.get_type(type_name)
    if not scope:
        return t.has_feature(name)
    return t.common_feature(name) is not None or any(
        v.feature(name) is not None for v in t.variations if v.var_id in scope)


def _feature_op(before: Schema, after: Schema, op: ChangeOp) -> Optional[str]:
    k = op.kind
    if k in (OpKind.COPY_FEATURE, OpKind.MOVE_FEATURE):
        (src,) = expand_selector(before, op)
        copied = op.new_name in _names(after, op.target_type)
        kept = src.feature in _names(after, src.type_name)
        if k is OpKind.COPY_FEATURE:
            return _ok(copied and kept, "f ∈ F^t1 ∧ f ∈ F^t2")
        return _ok(copied and (not kept or src.type_name == op.target_type and src.feature == op.new_name),
                   "f ∉ F^t1 ∧ f ∈ F^t2")
    if k in (OpKind.NEST_FEATURE, OpKind.UNNEST_FEATURE):
        e1, _, e2 = nest_partner(before, op)
        inner, outer = _names(after, e2.name), _names(after, e1.name)
        for name in op.selector.features:
            if k is OpKind.NEST_FEATURE and (name in outer or name not in inner):
                return "f ∉ F^e1 ∧ f ∈ F^e2"
            if k is OpKind.UNNEST_FEATURE and (name in inner or name not in outer):
                return "f ∈ F^e1 ∧ f ∉ F^e2"
        return None
    for target in expand_selector(before, op):
        scope = target.variations
        if k is OpKind.DELETE_FEATURE and _feature_in(after, target.type_name, target.feature, scope):
            return "f ∉ F^t"
        if k is OpKind.RENAME_FEATURE:
            if not _feature_in(after, target.type_name, op.new_name, scope):
                return "n ∈ F^t"
            if _feature_in(after, target.type_name, target.feature, scope):
                return "f ∉ F^t"
    return None


def _attribute(before: Schema, after: Schema, op: ChangeOp) -> Optional[str]:
    for target in expand_selector(before, op):
        t = after.get_type(target.type_name)
        if op.kind is OpKind.ADD_ATTR:
            at = t.common_feature(target.feature)
            if not isinstance(at, Attribute) or at.type != op.feature.type:
                return "at ∈ C^t"
            continue
        at = _scoped(t, target)
        if op.kind is OpKind.CAST_ATTR and at.type != op.scalar:
            return "at.type = st"
        elif op.kind is OpKind.PROMOTE_ATTR and not at.key:
            return "at.key = True"
        elif op.kind is OpKind.DEMOTE_ATTR and at.key:
            return "at.key = False"
    return None


def _reference(before: Schema, after: Schema, op: ChangeOp) -> Optional[str]:
    for target in expand_selector(before, op):
        t = after.get_type(target.type_name)
        if op.kind is OpKind.ADD_REF:
            rf = t.common_feature(target.feature)
            if not isinstance(rf, Reference) or rf.target != op.feature.target:
                return "rf ∈ C^t ∧ rf.type = e"
            continue
        if op.kind is OpKind.MORPH_REF:
            old = before.get_type(target.type_name).feature(target.feature)
            ag = t.feature(op.new_name or target.feature)
            if not isinstance(ag, Aggregate) or ag.target != old.target or ag.cardinality != old.cardinality:
                return "ag.name = rf.name ∧ ag.type = rf.type"
            continue
        rf = _scoped(t, target)
        if op.kind is OpKind.CAST_REF and rf.value_type != op.scalar:
            return "rf.type = st"
        if op.kind is OpKind.MULT_REF and rf.cardinality != op.cardinality:
            return "rf.lowerBound = l ∧ rf.upperBound = u"
    return None


def _aggregate(before: Schema, after: Schema, op: ChangeOp) -> Optional[str]:
    for target in expand_selector(before, op):
        e = after.get_type(target.type_name)
        if op.kind is OpKind.ADD_AGGR:
            ag = e.common_feature(target.feature)
            dst = after.entity(op.feature.target)
            if not isinstance(ag, Aggregate) or dst is None or dst.root:
                return "ag ∈ C^e ∧ ag.type ∈ E ∧ ¬ag.type.root"
            continue
        if op.kind is OpKind.MORPH_AGGR:
            old = before.get_type(target.type_name).feature(target.feature)
            rf = e.feature(op.new_name or target.feature)
            if not isinstance(rf, Reference) or rf.target != old.target:
                return "rf.name = ag.name ∧ rf.type = ag.type"
            continue
        if _scoped(e, target).cardinality != op.cardinality:
            return "ag.lowerBound = l ∧ ag.upperBound = u"
    return None


def _scoped(t, target):
    if target.variations:
        for v in t.variations:
            if v.var_id in target.variations and v.feature(target.feature) is not None:
                return v.feature(target.feature)
    return t.feature(target.feature)


_CHECKS: Dict[str, Callable[[Schema, Schema, ChangeOp], Optional[str]]] = {
    "schema type": _schema_type,
    "variation": _variation,
    "feature": _feature_op,
    "attribute": _attribute,
    "reference": _reference,
    "aggregate": _aggregate,
}


def check_postcondition(before: Schema, after: Schema, op: ChangeOp) -> Optional[str]:
    return _CHECKS[op.category.value](before, after, op)
