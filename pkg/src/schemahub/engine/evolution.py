"""Schema Updater: applies Orion change operations to a U-Schema.

Each operation checks its precondition against the current schema and
returns a new schema value; the input is never modified. After every
operation the result is validated, so an operation whose effect would break
well-formedness (deleting a type something still references, say) fails as
a precondition violation of that operation.
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from ..core.errors import AmbiguousSelector, NonScalarCastTarget, PreconditionViolation, UsingMismatch
from ..core.model import (
    Aggregate,
    Attribute,
    EntityType,
    Feature,
    RangeConstraint,
    Reference,
    RegexConstraint,
    ScalarType,
    Schema,
    SchemaType,
    StructuralVariation,
    TypeKind,
    renamed,
    single_variation,
)
from ..core.validation import validate
from ..frontends.orion.ast import ChangeOp, ChangeScript, OpCategory, OpKind
from ..frontends.orion.printer import print_op

log = logging.getLogger(__name__)

# kinds whose selectors may carry a variation list
VARIATION_SCOPED = frozenset({
    OpKind.DELETE_FEATURE, OpKind.RENAME_FEATURE, OpKind.CAST_ATTR, OpKind.CAST_REF,
    OpKind.MULT_REF, OpKind.MULT_AGGR,
})
# kinds that accept the * wildcard
WILDCARD_KINDS = frozenset({
    OpKind.DELETE_FEATURE, OpKind.RENAME_FEATURE, OpKind.CAST_ATTR, OpKind.PROMOTE_ATTR,
    OpKind.DEMOTE_ATTR, OpKind.CAST_REF, OpKind.ADD_ATTR,
})


@dataclass(frozen=True)
class ApplyOutcome:
    schema: Schema
    log: Tuple[Tuple[int, str], ...] = ()
    failed_at: Optional[Tuple[int, PreconditionViolation]] = None

    @property
    def ok(self) -> bool:
        return self.failed_at is None


class Target(NamedTuple):
    """One (type, feature) pair a selector resolves to."""
    type_name: str
    feature: str
    variations: Tuple[int, ...] = ()


def _require(cond: bool, clause: str, detail: str = ""):
    if not cond:
        raise PreconditionViolation(clause, detail=detail)


# ---------------------------------------------------------------- lookups

def _type(schema: Schema, name: str, flavor: Optional[TypeKind] = None, clause: str = "t ∈ T") -> SchemaType:
    t = schema.find_type(name)
    _require(t is not None, clause, name)
    if flavor is not None:
        what = "an entity type" if flavor is TypeKind.ENTITY else "a relationship type"
        _require(t.kind is flavor, f"t is {what}", name)
    return t


def _entity(schema: Schema, name: str) -> EntityType:
    return _type(schema, name, TypeKind.ENTITY, "e ∈ E")


def resolve_path(schema: Schema, type_name: str, path: str) -> Tuple[str, str]:
    """Follow a dotted feature path through aggregates to (owner type, feature)."""
    owner = type_name
    *hops, last = path.split(".")
    for hop in hops:
        t = schema.get_type(owner)
        f = t.feature(hop)
        _require(isinstance(f, Aggregate), "path resolves through aggregates", f"{owner}.{hop}")
        owner = f.target
    return owner, last


def expand_selector(schema: Schema, op: ChangeOp) -> List[Target]:
    """Concrete targets of a feature-level operation, in application order.

    A wildcard keeps only the types that own the feature (or, for ADD ATTR,
    the types lacking it); matching no type at all is a violation.
    """
    sel = op.selector
    _require(sel is not None, "operation has a feature selector")
    if sel.variations:
        _require(op.kind in VARIATION_SCOPED, "operation applies to whole schema types", str(sel))
    if not sel.wildcard:
        _type(schema, sel.type_name)
        out = []
        for name in sel.features:
            owner, feat = resolve_path(schema, sel.type_name, name)
            if owner != sel.type_name:
                _require(not sel.variations, "variation list applies to the selected type", name)
            out.append(Target(owner, feat, sel.variations))
        return out

    _require(op.kind in WILDCARD_KINDS, "selector names a single schema type", str(sel))
    out = []
    for name in sel.features:
        _require("." not in name, "wildcard features are not dotted", name)
        for t in schema.types():
            present = t.has_feature(name)
            if op.kind is OpKind.ADD_ATTR:
                present = not present
            elif present and not _kind_matches(op.kind, t.feature(name)):
                present = False
            if present:
                out.append(Target(t.name, name))
    _require(bool(out), "wildcard matches some schema type", str(sel))
    skipped = {t.name for t in schema.types()} - {x.type_name for x in out}
    if skipped:
        log.warning("%s: no match in %s", sel, ", ".join(sorted(skipped)))
    return out


def _kind_matches(kind: OpKind, f: Feature) -> bool:
    if kind.category is OpCategory.ATTRIBUTE:
        return isinstance(f, Attribute)
    if kind.category is OpCategory.REFERENCE:
        return isinstance(f, Reference)
    return True


# --------------------------------------------------------- type rewriting

def _push_down(t: SchemaType, name: str) -> SchemaType:
    f = t.common_feature(name)
    if f is None:
        return t
    return replace(
        t,
        common=tuple(x for x in t.common if x.name != name),
        variations=tuple(replace(v, features=v.features + (f,)) for v in t.variations),
    )


def _rewrite(t: SchemaType, name: str, fn: Callable[[Feature], Optional[Feature]],
             scope: Sequence[int] = ()) -> SchemaType:
    """Replace feature ``name`` by ``fn(f)`` (None drops it), optionally only in
    the scoped variations."""
    def apply(features):
        out = []
        for f in features:
            if f.name == name:
                f = fn(f)
            if f is not None:
                out.append(f)
        return tuple(out)

    if scope:
        t = _push_down(t, name)
        for v in scope:
            _require(t.has_variation(v), "v ∈ V^t", f"{t.name}.v{v}")
        return replace(t, variations=tuple(
            replace(v, features=apply(v.features)) if v.var_id in scope else v for v in t.variations))
    return replace(t, common=apply(t.common), variations=tuple(
        replace(v, features=apply(v.features)) for v in t.variations))


def _add_common(t: SchemaType, f: Feature) -> SchemaType:
    return replace(t, common=t.common + (f,))


def _feature(t: SchemaType, name: str, clause: str = "f ∈ F^t") -> Feature:
    f = t.feature(name)
    _require(f is not None, clause, f"{t.name}.{name}")
    return f


def _unique_names(features: Iterable[Feature], clause: str):
    seen = set()
    for f in features:
        _require(f.name not in seen, clause, f.name)
        seen.add(f.name)


def _copy_of(f: Feature, name: str) -> Feature:
    f = renamed(f, name)
    return replace(f, key=False) if isinstance(f, Attribute) else f


def _new_type(name: str, features: Sequence[Feature], kind: TypeKind, root: bool) -> SchemaType:
    return single_variation(name, features, kind, root=root if kind is TypeKind.ENTITY else False)


# ------------------------------------------------------------ schema types

def apply_schema_type_op(schema: Schema, op: ChangeOp) -> Schema:
    k, names = op.kind, op.type_names
    if k is OpKind.ADD_TYPE:
        _require(not schema.has_type(names[0]), "t ∉ T", names[0])
        _unique_names(op.body, "feature names are distinct")
        return schema.splice(names[0], _new_type(names[0], op.body, op.flavor, op.root))

    t = _type(schema, names[0], op.flavor)
    if k is OpKind.DELETE_TYPE:
        return schema.without_types(t.name)

    if k is OpKind.RENAME_TYPE:
        _require(not schema.has_type(op.new_name), "n ∉ T.names", op.new_name)
        return schema.splice(t.name, replace(t, name=op.new_name)).retarget(t.name, op.new_name)

    if k is OpKind.EXTRACT_TYPE:
        _require(not schema.has_type(op.new_name), "n ∉ T.names", op.new_name)
        feats = [_feature(t, n, "fs ⊆ F^t") for n in op.selector.features]
        _unique_names(feats, "fs names are distinct")
        new = _new_type(op.new_name, feats, t.kind, t.root)
        return schema.splice(new.name, new)

    if k is OpKind.SPLIT_TYPE:
        a, b = op.parts
        _require(a.name != b.name, "n1 ≠ n2", a.name)
        parts = []
        for part in (a, b):
            _require(not schema.has_type(part.name), "n ∉ T.names", part.name)
            feats = [_feature(t, n, "fs ⊆ F^t") for n in part.features]
            _unique_names(feats, "fs names are distinct")
            parts.append(_new_type(part.name, feats, t.kind, t.root))
        return schema.splice(t.name, *parts)

    if k is OpKind.MERGE_TYPE:
        other = _type(schema, names[1], op.flavor)
        _require(other.name != t.name, "t1 ≠ t2", t.name)
        _require(not schema.has_type(op.new_name), "n ∉ T.names", op.new_name)
        merged: Dict[str, Feature] = {f.name: f for f in t.all_features()}
        for f in other.all_features():
            _require(merged.setdefault(f.name, f) == f,
                     "t1.features ∪ t2.features is well-defined", f.name)
        new = _new_type(op.new_name, list(merged.values()), t.kind, t.root or other.root)
        return schema.without_types(other.name).splice(t.name, new)

    raise ValueError(f"not a schema type operation: {k}")


# -------------------------------------------------------------- variations

def apply_variation_op(schema: Schema, op: ChangeOp) -> Schema:
    t = _type(schema, op.type_names[0], op.flavor)
    if op.kind in (OpKind.DELVAR, OpKind.ADAPT):
        source = op.variations[0]
        _require(t.has_variation(source), "v1 ∈ V^t", f"{t.name}.v{source}")
        if op.kind is OpKind.ADAPT:
            target = op.variations[1]
            _require(source != target, "v1 ≠ v2", f"{t.name}.v{source}")
            _require(t.has_variation(target), "v2 ∈ V^t", f"{t.name}.v{target}")
        _require(len(t.variations) > 1, "V^t keeps some variation", t.name)
        kept = tuple(v for v in t.variations if v.var_id != source)
        return schema.with_type(replace(t, variations=kept))

    if op.kind is OpKind.UNION:
        _require(bool(t.variations), "V^t ≠ ∅", t.name)
        added: Dict[str, Feature] = {}
        for v in t.variations:
            for f in v.features:
                added.setdefault(f.name, f)
        counts = [v.count for v in t.variations]
        total = sum(counts) if all(c is not None for c in counts) else None
        merged = StructuralVariation(1, tuple(added.values()), total)
        return schema.with_type(replace(t, variations=(merged,)))

    raise ValueError(f"not a variation operation: {op.kind}")


# ---------------------------------------------------------------- features

def apply_feature_op(schema: Schema, op: ChangeOp) -> Schema:
    k = op.kind
    if k in (OpKind.COPY_FEATURE, OpKind.MOVE_FEATURE):
        return _copy_or_move(schema, op)
    if k in (OpKind.NEST_FEATURE, OpKind.UNNEST_FEATURE):
        return _nest_or_unnest(schema, op)

    for target in expand_selector(schema, op):
        t = schema.get_type(target.type_name)
        scope = target.variations
        f = _feature(t, target.feature)
        if scope:
            for v in scope:
                _require(t.has_variation(v), "v ∈ V^t", f"{t.name}.v{v}")
            _require(any(v.feature(f.name) for v in _push_down(t, f.name).variations
                         if v.var_id in scope), "f ∈ v.features", f"{t.name}.{f.name}")
        if k is OpKind.DELETE_FEATURE:
            t = _rewrite(t, f.name, lambda _: None, scope)
        elif k is OpKind.RENAME_FEATURE:
            t = _rename_feature(t, f, op.new_name, scope)
        else:
            raise ValueError(f"not a feature operation: {k}")
        schema = schema.with_type(t)
    return schema


def _rename_feature(t: SchemaType, f: Feature, new: str, scope: Sequence[int]) -> SchemaType:
    if not scope:
        _require(not t.has_feature(new), "n ∉ F^t", f"{t.name}.{new}")
        return _rewrite(t, f.name, lambda x: renamed(x, new))
    pushed = _push_down(t, f.name)
    _require(t.common_feature(new) is None, "n ∉ F^t", f"{t.name}.{new}")
    for v in pushed.variations:
        existing = v.feature(new)
        if existing is None:
            continue
        if v.var_id in scope:
            raise PreconditionViolation("n ∉ F^t", detail=f"{t.name}.v{v.var_id}.{new}")
        if existing != renamed(f, new):
            raise AmbiguousSelector("renamed feature is unambiguous in t",
                                    detail=f"{t.name}.v{v.var_id}.{new}")
    return _rewrite(t, f.name, lambda x: renamed(x, new), scope)


def _join_check(schema: Schema, op: ChangeOp, origin: str, destination: str):
    if op.join is None:
        return
    _require(schema.get_type(origin).has_feature(op.join.source_feature),
             "join feature ∈ F^origin", f"{origin}.{op.join.source_feature}")
    _require(schema.get_type(destination).has_feature(op.join.target_feature),
             "join feature ∈ F^destination", f"{destination}.{op.join.target_feature}")


def _copy_or_move(schema: Schema, op: ChangeOp) -> Schema:
    (src,) = expand_selector(schema, op)
    t1 = schema.get_type(src.type_name)
    f = _feature(t1, src.feature, "f ∈ F^t1")
    t2 = _type(schema, op.target_type, clause="t2 ∈ T")
    _require(not t2.has_feature(op.new_name), "f ∉ F^t2", f"{t2.name}.{op.new_name}")
    _join_check(schema, op, t1.name, t2.name)
    schema = schema.with_type(_add_common(t2, _copy_of(f, op.new_name)))
    if op.kind is OpKind.MOVE_FEATURE:
        t1 = schema.get_type(t1.name)
        schema = schema.with_type(_rewrite(t1, f.name, lambda _: None))
    return schema


def nest_partner(schema: Schema, op: ChangeOp) -> Tuple[EntityType, Aggregate, EntityType]:
    """(e1, ag, e2) for NEST/UNNEST: ag ∈ F^e1 aggregates e2."""
    sel = op.selector
    _require(not sel.wildcard, "selector names a single schema type", str(sel))
    e1 = _entity(schema, sel.type_name)
    ag = e1.feature(op.aggregate)
    _require(isinstance(ag, Aggregate), "ag ∈ F^e1 is an aggregate", f"{e1.name}.{op.aggregate}")
    e2 = _entity(schema, ag.target)
    return e1, ag, e2


def _nest_or_unnest(schema: Schema, op: ChangeOp) -> Schema:
    e1, ag, e2 = nest_partner(schema, op)
    nesting = op.kind is OpKind.NEST_FEATURE
    if not nesting:
        _require(not ag.cardinality.many, "ag.upperBound = 1", f"{e1.name}.{ag.name}")
    for name in op.selector.features:
        _require("." not in name, "nested features are direct", name)
        e1, e2 = schema.get_type(e1.name), schema.get_type(e2.name)
        src, dst = (e1, e2) if nesting else (e2, e1)
        f = _feature(src, name, "f ∈ F^e1" if nesting else "f ∈ F^e2")
        _require(f.name != ag.name, "f ≠ ag", name)
        _require(not dst.has_feature(name), "f ∉ F^e2" if nesting else "f ∉ F^e1", f"{dst.name}.{name}")
        schema = schema.with_type(_rewrite(src, name, lambda _: None))
        schema = schema.with_type(_add_common(schema.get_type(dst.name), f))
    return schema


# -------------------------------------------------------------- attributes

def _cast_constraint(a: Attribute, to: ScalarType):
    c = a.constraint
    if isinstance(c, RegexConstraint) and to is ScalarType.STRING:
        return c
    if isinstance(c, RangeConstraint) and to in (ScalarType.INTEGER, ScalarType.DOUBLE):
        return c
    return None


def apply_attribute_op(schema: Schema, op: ChangeOp) -> Schema:
    k = op.kind
    if k is OpKind.CAST_ATTR and not isinstance(op.scalar, ScalarType):
        raise NonScalarCastTarget("st is a scalar type", detail=str(op.scalar))
    for target in expand_selector(schema, op):
        t = schema.get_type(target.type_name)
        if k is OpKind.ADD_ATTR:
            _require(not op.selector.variations, "operation applies to whole schema types")
            _require(not t.has_feature(target.feature), "at ∉ F^t", f"{t.name}.{target.feature}")
            attr = renamed(op.feature, target.feature)
            schema = schema.with_type(_add_common(t, attr))
            continue
        at = _feature(t, target.feature, "at ∈ F^t")
        _require(isinstance(at, Attribute), "at is an attribute", f"{t.name}.{at.name}")
        if k is OpKind.CAST_ATTR:
            to = op.scalar
            t = _rewrite(t, at.name, lambda a: replace(a, type=to, constraint=_cast_constraint(a, to)),
                         target.variations)
        elif k is OpKind.PROMOTE_ATTR:
            _require(t.kind is TypeKind.ENTITY, "e ∈ E", t.name)
            _require(not at.key, "at.key = False", f"{t.name}.{at.name}")
            t = _rewrite(t, at.name, lambda a: replace(a, key=True))
        elif k is OpKind.DEMOTE_ATTR:
            _require(at.key, "at.key = True", f"{t.name}.{at.name}")
            t = _rewrite(t, at.name, lambda a: replace(a, key=False))
        else:
            raise ValueError(f"not an attribute operation: {k}")
        schema = schema.with_type(t)
    return schema


# -------------------------------------------------------------- references

def _referenced_elsewhere(schema: Schema, target: str, owner: str, name: str) -> bool:
    for t in schema.types():
        for f in t.all_features():
            if isinstance(f, Reference) and f.target == target and (t.name, f.name) != (owner, name):
                return True
    return False


def apply_reference_op(schema: Schema, op: ChangeOp) -> Schema:
    k = op.kind
    if k is OpKind.ADD_REF:
        (target,) = expand_selector(schema, op)
        t = schema.get_type(target.type_name)
        _require(not t.has_feature(target.feature), "rf ∉ F^t", f"{t.name}.{target.feature}")
        ref: Reference = renamed(op.feature, target.feature)
        _require(schema.entity(ref.target) is not None, "rf.type ∈ E", ref.target)
        _join_check(schema, op, ref.target, t.name)
        return schema.with_type(_add_common(t, ref))

    if k is OpKind.CAST_REF and not isinstance(op.scalar, ScalarType):
        raise NonScalarCastTarget("st is a scalar type", detail=str(op.scalar))

    for target in expand_selector(schema, op):
        t = schema.get_type(target.type_name)
        rf = _feature(t, target.feature, "rf ∈ F^t")
        _require(isinstance(rf, Reference), "rf is a reference", f"{t.name}.{rf.name}")
        if k is OpKind.CAST_REF:
            _require(not rf.attributes, "rf.attributes = ∅", f"{t.name}.{rf.name}")
            t = _rewrite(t, rf.name, lambda r: replace(r, value_type=op.scalar), target.variations)
            schema = schema.with_type(t)
        elif k is OpKind.MULT_REF:
            t = _rewrite(t, rf.name, lambda r: replace(r, cardinality=op.cardinality), target.variations)
            schema = schema.with_type(t)
        elif k is OpKind.MORPH_REF:
            schema = _morph_ref(schema, t, rf, op.new_name or rf.name)
        else:
            raise ValueError(f"not a reference operation: {k}")
    return schema


def _morph_ref(schema: Schema, t: SchemaType, rf: Reference, new: str) -> Schema:
    _require(t.kind is TypeKind.ENTITY, "e ∈ E", t.name)
    if new != rf.name:
        _require(not t.has_feature(new), "n ∉ F^t", f"{t.name}.{new}")
    target = _entity(schema, rf.target)
    ag = Aggregate(new, rf.target, rf.cardinality, rf.optional)
    schema = schema.with_type(_rewrite(t, rf.name, lambda _: ag))
    if target.root:
        _require(not _referenced_elsewhere(schema, target.name, t.name, new),
                 "rf.type is referenced only by rf", target.name)
        schema = schema.with_type(replace(schema.entity(target.name), is_root=False))
    return schema


# -------------------------------------------------------------- aggregates

def apply_aggregate_op(schema: Schema, op: ChangeOp) -> Schema:
    k = op.kind
    if k is OpKind.ADD_AGGR:
        (target,) = expand_selector(schema, op)
        e = _entity(schema, target.type_name)
        _require(not e.has_feature(target.feature), "ag ∉ F^e", f"{e.name}.{target.feature}")
        ag: Aggregate = renamed(op.feature, target.feature)
        if op.inline:
            _require(not schema.has_type(ag.target), "ag.type ∉ T", ag.target)
            _unique_names(op.body, "feature names are distinct")
            schema = schema.splice(ag.target, _new_type(ag.target, op.body, TypeKind.ENTITY, False))
        else:
            dst = schema.entity(ag.target)
            _require(dst is not None and not dst.root, "ag.type is a non-root entity", ag.target)
        return schema.with_type(_add_common(schema.get_type(e.name), ag))

    for target in expand_selector(schema, op):
        e = _entity(schema, target.type_name)
        ag = _feature(e, target.feature, "ag ∈ F^e")
        _require(isinstance(ag, Aggregate), "ag is an aggregate", f"{e.name}.{ag.name}")
        if k is OpKind.MULT_AGGR:
            schema = schema.with_type(
                _rewrite(e, ag.name, lambda a: replace(a, cardinality=op.cardinality), target.variations))
        elif k is OpKind.MORPH_AGGR:
            new = op.new_name or ag.name
            if new != ag.name:
                _require(not e.has_feature(new), "n ∉ F^e", f"{e.name}.{new}")
            rf = Reference(new, ag.target, ag.cardinality, ag.optional)
            schema = schema.with_type(_rewrite(e, ag.name, lambda _: rf))
        else:
            raise ValueError(f"not an aggregate operation: {k}")
    return schema


# -------------------------------------------------------------- dispatch

_BY_CATEGORY = {
    OpCategory.SCHEMA_TYPE: apply_schema_type_op,
    OpCategory.VARIATION: apply_variation_op,
    OpCategory.FEATURE: apply_feature_op,
    OpCategory.ATTRIBUTE: apply_attribute_op,
    OpCategory.REFERENCE: apply_reference_op,
    OpCategory.AGGREGATE: apply_aggregate_op,
}


def apply_op(schema: Schema, op: ChangeOp) -> Schema:
    """One operation: precondition, effect, well-formedness guard."""
    result = _BY_CATEGORY[op.category](schema, op)
    violations = validate(result)
    if violations:
        first = violations[0]
        raise PreconditionViolation(f"resulting schema is well-formed ({first.rule})", detail=first.path)
    return result


def check_using(schema: Schema, script: ChangeScript):
    actual = (schema.name, schema.version)
    if tuple(script.using) != actual:
        raise UsingMismatch(tuple(script.using), actual)


def apply_script(schema: Schema, script: ChangeScript,
                 apply: Callable[[Schema, ChangeOp], Schema] = apply_op) -> ApplyOutcome:
    """Apply every operation in order, halting at the first violation."""
    check_using(schema, script)
    current = schema
    rows: List[Tuple[int, str]] = []
    for i, op in enumerate(script.ops):
        try:
            current = apply(current, op)
        except PreconditionViolation as e:
            e.at(i)
            log.warning("op %d failed: %s", i, e)
            return ApplyOutcome(current, tuple(rows), (i, e))
        summary = print_op(op)
        rows.append((i, summary))
        log.info("op %d: %s", i, summary)
    return ApplyOutcome(current.bump(), tuple(rows))
