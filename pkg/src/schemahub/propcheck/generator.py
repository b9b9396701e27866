"""Random well-formed schemas and operations applicable to them.

Schema type names come from ``E<n>``/``R<n>`` and feature names from
``f<n>``; names an operation introduces come from the disjoint ``N<n>`` and
``g<n>`` pools, so Rename/Extract/Add never collide by accident.
"""
import logging
import random
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from ..core.model import (
    LEGAL_CARDINALITIES,
    Aggregate,
    Attribute,
    Cardinality,
    EntityType,
    Feature,
    ListType,
    RangeConstraint,
    Reference,
    RegexConstraint,
    RelationshipType,
    ScalarType,
    Schema,
    SchemaType,
    StructuralVariation,
    TypeKind,
)
from ..core.validation import validate
from ..data.database import StoreMode
from ..frontends.orion.ast import ChangeOp, FeatureSelector, JoinCondition, OpKind, SplitPart
from .preconditions import precondition_holds

log = logging.getLogger(__name__)

SCALARS = (ScalarType.STRING, ScalarType.INTEGER, ScalarType.DOUBLE, ScalarType.BOOLEAN, ScalarType.TIMESTAMP)
CARDINALITIES = tuple(Cardinality(lo, hi) for lo, hi in sorted(LEGAL_CARDINALITIES))

# candidates tried per gen_applicable_op call before giving up
MAX_TRIES = 32


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_types: int = 4
    max_variations: int = 3
    max_features: int = 6
    mode: StoreMode = StoreMode.AGGREGATE

    def __post_init__(self):
        for name in ("max_types", "max_variations", "max_features"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")


def fresh(taken: Iterable[str], prefix: str) -> str:
    used = set(taken)
    n = 0
    while f"{prefix}{n}" in used:
        n += 1
    return f"{prefix}{n}"


def _feature_names(schema: Schema) -> List[str]:
    return [f.name for t in schema.types() for f in t.all_features()]


def _attribute(rng: random.Random, name: str, key: bool = False) -> Attribute:
    if key:
        return Attribute(name, rng.choice((ScalarType.STRING, ScalarType.INTEGER)), key=True)
    roll = rng.random()
    if roll < 0.1:
        return Attribute(name, ListType(ScalarType.STRING))
    scalar = rng.choice(SCALARS)
    constraint = None
    if scalar is ScalarType.STRING and roll > 0.9:
        constraint = RegexConstraint("[a-z]+")
    elif scalar is ScalarType.INTEGER and roll > 0.85:
        lo = rng.randint(0, 10)
        constraint = RangeConstraint(lo, lo + rng.randint(0, 100))
    return Attribute(name, scalar, optional=rng.random() < 0.2, constraint=constraint)


def gen_schema(cfg: GenConfig) -> Schema:
    """A valid schema drawn deterministically from ``cfg.seed``."""
    rng = random.Random(cfg.seed)
    n_types = rng.randint(1, cfg.max_types)
    graph = cfg.mode is StoreMode.GRAPH

    # (name, kind, root); entity 0 is always root
    plan = []
    for i in range(n_types):
        if i > 0 and graph and rng.random() < 0.3:
            plan.append((f"R{i}", TypeKind.RELATIONSHIP, False))
        else:
            plan.append((f"E{i}", TypeKind.ENTITY, i == 0 or rng.random() < 0.6))
    roots = [name for name, kind, root in plan if kind is TypeKind.ENTITY and root]

    counter = iter(range(10_000))
    entities, relationships = [], []
    for i, (name, kind, root) in enumerate(plan):
        k = rng.randint(1, cfg.max_features)
        feats: List[Feature] = []
        for j in range(k):
            fname = f"f{next(counter)}"
            roll = rng.random()
            embeddable = [n for n, kd, r in plan[i + 1:] if kd is TypeKind.ENTITY and not r]
            if j == 0 and kind is TypeKind.ENTITY and root and rng.random() < 0.5:
                feats.append(_attribute(rng, fname, key=True))
            elif roll < 0.15 and kind is TypeKind.ENTITY:
                if graph and rng.random() < 0.5:
                    ref = Reference(fname, rng.choice(roots), rng.choice(CARDINALITIES),
                                    attributes=(_attribute(rng, f"f{next(counter)}"),))
                else:
                    ref = Reference(fname, rng.choice(roots), rng.choice(CARDINALITIES),
                                    value_type=rng.choice((None, ScalarType.STRING, ScalarType.INTEGER)))
                feats.append(ref)
            elif roll < 0.25 and embeddable and kind is TypeKind.ENTITY:
                feats.append(Aggregate(fname, rng.choice(embeddable), rng.choice(CARDINALITIES)))
            else:
                feats.append(_attribute(rng, fname))

        c = rng.randint(0, len(feats))
        common, variable = feats[:c], feats[c:]
        nv = rng.randint(1, cfg.max_variations)
        added: List[List[Feature]] = [[] for _ in range(nv)]
        for j, f in enumerate(variable):
            for v in range(nv):
                if v == j % nv or rng.random() < 0.3:
                    added[v].append(f)
        variations = tuple(
            StructuralVariation(v + 1, tuple(fs), rng.choice((None, rng.randint(0, 100))))
            for v, fs in enumerate(added))
        if kind is TypeKind.RELATIONSHIP:
            relationships.append(RelationshipType(name, tuple(common), variations))
        else:
            entities.append(EntityType(name, tuple(common), variations, is_root=root))

    schema = Schema(f"gen{cfg.seed}", 1, tuple(entities), tuple(relationships))
    violations = validate(schema)
    if violations:
        raise AssertionError(f"generator produced an invalid schema: {violations[0]}")
    return schema


# ------------------------------------------------------------ candidates

def _flavor(t: SchemaType) -> TypeKind:
    return t.kind


def _subset(rng: random.Random, names: Sequence[str]) -> tuple:
    k = rng.randint(1, len(names))
    return tuple(rng.sample(list(names), k))


def _entities(schema: Schema, root: Optional[bool] = None) -> List[EntityType]:
    return [e for e in schema.entity_types if root is None or e.root == root]


def _features(schema: Schema, kind=None, entities_only: bool = False):
    for t in schema.types():
        if entities_only and t.kind is not TypeKind.ENTITY:
            continue
        for f in t.all_features():
            if kind is None or isinstance(f, kind):
                yield t, f


def _scope(rng: random.Random, t: SchemaType, name: str) -> tuple:
    """Sometimes a variation list whose variations hold ``name``."""
    holding = [v.var_id for v in t.variations if v.feature(name) is not None]
    if t.common_feature(name) is not None:
        holding = [v.var_id for v in t.variations]
    if len(t.variations) < 2 or not holding or rng.random() < 0.6:
        return ()
    return tuple(sorted(rng.sample(holding, rng.randint(1, len(holding)))))


def _type_ops(schema: Schema, kind: OpKind, rng: random.Random) -> List[ChangeOp]:
    types = list(schema.types())
    new = fresh(schema.type_names, "N")
    out: List[ChangeOp] = []
    if kind is OpKind.ADD_TYPE:
        flavors = [TypeKind.ENTITY] + ([TypeKind.RELATIONSHIP] if schema.relationship_types else [])
        for flavor in flavors:
            body = (_attribute(rng, fresh(_feature_names(schema), "g")),)
            out.append(ChangeOp(kind, flavor, (new,), body=body, root=flavor is TypeKind.ENTITY))
    elif kind is OpKind.DELETE_TYPE:
        out += [ChangeOp(kind, _flavor(t), (t.name,)) for t in types]
    elif kind is OpKind.RENAME_TYPE:
        out += [ChangeOp(kind, _flavor(t), (t.name,), new_name=new) for t in types]
    elif kind is OpKind.EXTRACT_TYPE:
        for t in types:
            names = [f.name for f in t.all_features()]
            if names:
                out.append(ChangeOp(kind, _flavor(t), (t.name,),
                                    selector=FeatureSelector(t.name, _subset(rng, names)), new_name=new))
    elif kind is OpKind.SPLIT_TYPE:
        second = fresh(schema.type_names + [new], "N")
        for t in types:
            names = [f.name for f in t.all_features()]
            if names:
                parts = (SplitPart(new, _subset(rng, names)), SplitPart(second, _subset(rng, names)))
                out.append(ChangeOp(kind, _flavor(t), (t.name,), parts=parts))
    elif kind is OpKind.MERGE_TYPE:
        for a in types:
            for b in types:
                if a.name != b.name and a.kind is b.kind:
                    out.append(ChangeOp(kind, _flavor(a), (a.name, b.name), new_name=new))
    return out


def _variation_ops(schema: Schema, kind: OpKind, rng: random.Random) -> List[ChangeOp]:
    out: List[ChangeOp] = []
    for t in schema.types():
        ids = [v.var_id for v in t.variations]
        if kind is OpKind.UNION:
            out.append(ChangeOp(kind, _flavor(t), (t.name,)))
        elif len(ids) > 1 and kind is OpKind.DELVAR:
            out += [ChangeOp(kind, _flavor(t), (t.name,), variations=(v,)) for v in ids]
        elif len(ids) > 1 and kind is OpKind.ADAPT:
            out += [ChangeOp(kind, _flavor(t), (t.name,), variations=(a, b))
                    for a in ids for b in ids if a != b]
    return out


def _join(rng: random.Random, origin: SchemaType, destination: SchemaType) -> Optional[JoinCondition]:
    left = [f.name for f in origin.all_features() if isinstance(f, Attribute)]
    right = [f.name for f in destination.all_features() if isinstance(f, Attribute)]
    if not left or not right or rng.random() < 0.5:
        return None
    return JoinCondition(rng.choice(left), rng.choice(right))


def _feature_ops(schema: Schema, kind: OpKind, rng: random.Random) -> List[ChangeOp]:
    out: List[ChangeOp] = []
    new = fresh(_feature_names(schema), "g")
    if kind in (OpKind.DELETE_FEATURE, OpKind.RENAME_FEATURE):
        for t, f in _features(schema):
            sel = FeatureSelector(t.name, (f.name,), _scope(rng, t, f.name))
            out.append(ChangeOp(kind, selector=sel, new_name=new if kind is OpKind.RENAME_FEATURE else None))
    elif kind in (OpKind.COPY_FEATURE, OpKind.MOVE_FEATURE):
        for t, f in _features(schema, Attribute):
            for dest in schema.types():
                out.append(ChangeOp(kind, selector=FeatureSelector(t.name, (f.name,)), target_type=dest.name,
                                    new_name=new, join=_join(rng, t, dest)))
    elif kind in (OpKind.NEST_FEATURE, OpKind.UNNEST_FEATURE):
        for e1, ag in _features(schema, Aggregate, entities_only=True):
            e2 = schema.get_type(ag.target)
            if kind is OpKind.NEST_FEATURE:
                movable = [f.name for f in e1.all_features() if f.name != ag.name and not e2.has_feature(f.name)]
            else:
                movable = [f.name for f in e2.all_features() if not e1.has_feature(f.name)]
            if movable:
                out.append(ChangeOp(kind, selector=FeatureSelector(e1.name, _subset(rng, movable)),
                                    aggregate=ag.name))
    return out


def _attribute_ops(schema: Schema, kind: OpKind, rng: random.Random) -> List[ChangeOp]:
    out: List[ChangeOp] = []
    if kind is OpKind.ADD_ATTR:
        name = fresh(_feature_names(schema), "g")
        attr = _attribute(rng, name)
        out += [ChangeOp(kind, selector=FeatureSelector(t.name, (name,)), feature=attr) for t in schema.types()]
        out.append(ChangeOp(kind, selector=FeatureSelector(None, (name,)), feature=attr))
        return out
    for t, a in _features(schema, Attribute):
        if kind is OpKind.CAST_ATTR:
            out.append(ChangeOp(kind, selector=FeatureSelector(t.name, (a.name,), _scope(rng, t, a.name)),
                                scalar=rng.choice(SCALARS)))
        elif kind is OpKind.PROMOTE_ATTR and not a.key and t.kind is TypeKind.ENTITY:
            out.append(ChangeOp(kind, selector=FeatureSelector(t.name, (a.name,))))
        elif kind is OpKind.DEMOTE_ATTR and a.key:
            out.append(ChangeOp(kind, selector=FeatureSelector(t.name, (a.name,))))
    return out


def _reference_ops(schema: Schema, kind: OpKind, rng: random.Random) -> List[ChangeOp]:
    out: List[ChangeOp] = []
    if kind is OpKind.ADD_REF:
        name = fresh(_feature_names(schema), "g")
        for t in schema.types():
            for target in _entities(schema):
                ref = Reference(name, target.name, rng.choice(CARDINALITIES),
                                value_type=rng.choice((None, ScalarType.STRING)))
                out.append(ChangeOp(kind, selector=FeatureSelector(t.name, (name,)), feature=ref,
                                    join=_join(rng, target, t)))
        return out
    for t, rf in _features(schema, Reference):
        sel = FeatureSelector(t.name, (rf.name,))
        if kind is OpKind.CAST_REF and not rf.attributes:
            out.append(ChangeOp(kind, selector=FeatureSelector(t.name, (rf.name,), _scope(rng, t, rf.name)),
                                scalar=rng.choice(SCALARS)))
        elif kind is OpKind.MULT_REF:
            out.append(ChangeOp(kind, selector=FeatureSelector(t.name, (rf.name,), _scope(rng, t, rf.name)),
                                cardinality=rng.choice(CARDINALITIES)))
        elif kind is OpKind.MORPH_REF and t.kind is TypeKind.ENTITY:
            out.append(ChangeOp(kind, selector=sel))
    return out


def _aggregate_ops(schema: Schema, kind: OpKind, rng: random.Random) -> List[ChangeOp]:
    out: List[ChangeOp] = []
    if kind is OpKind.ADD_AGGR:
        name = fresh(_feature_names(schema), "g")
        for e in _entities(schema):
            sel = FeatureSelector(e.name, (name,))
            card = rng.choice(CARDINALITIES)
            inner = fresh(schema.type_names, "N")
            body = (_attribute(rng, fresh(_feature_names(schema) + [name], "g")),)
            out.append(ChangeOp(kind, selector=sel, feature=Aggregate(name, inner, card), body=body, inline=True))
            for target in _entities(schema, root=False):
                out.append(ChangeOp(kind, selector=sel, feature=Aggregate(name, target.name, card)))
        return out
    for e, ag in _features(schema, Aggregate, entities_only=True):
        if kind is OpKind.MULT_AGGR:
            out.append(ChangeOp(kind, selector=FeatureSelector(e.name, (ag.name,), _scope(rng, e, ag.name)),
                                cardinality=rng.choice(CARDINALITIES)))
        elif kind is OpKind.MORPH_AGGR:
            out.append(ChangeOp(kind, selector=FeatureSelector(e.name, (ag.name,))))
    return out


_BUILDERS: Dict[str, Callable[[Schema, OpKind, random.Random], List[ChangeOp]]] = {
    "schema type": _type_ops,
    "variation": _variation_ops,
    "feature": _feature_ops,
    "attribute": _attribute_ops,
    "reference": _reference_ops,
    "aggregate": _aggregate_ops,
}


def candidates(schema: Schema, kind: OpKind, rng: random.Random) -> List[ChangeOp]:
    """Every operation of ``kind`` shaped to meet its precondition on ``schema``."""
    return _BUILDERS[kind.category.value](schema, kind, rng)


def gen_applicable_op(schema: Schema, kind: OpKind, rng: random.Random) -> Optional[ChangeOp]:
    """A random ``kind`` operation whose precondition holds on ``schema``, or None."""
    pool = candidates(schema, kind, rng)
    rng.shuffle(pool)
    for op in pool[:MAX_TRIES]:
        if precondition_holds(schema, op):
            return op
    log.debug("%s: no applicable operation in %s", kind.value, schema.name)
    return None
