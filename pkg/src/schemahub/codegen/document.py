"""MongoDB shell statements.

Every schema type maps to the collection ``<schema>.<Type>``; feature
updates become ``updateMany`` calls (stackable) and anything that has to
read another collection runs in its own aggregation pipeline.
"""
import json
from typing import Any, List, Optional, Sequence

import orjson

from ..core.errors import UnsupportedTargetOp
from ..core.model import (
    Aggregate,
    Feature,
    RelationshipType,
    ScalarType,
    Schema,
    SchemaType,
    TypeKind,
    renamed,
)
from ..data.migrate import feature_default, key_name
from ..data.values import MapValue, SetValue, Timestamp
from ..engine.evolution import expand_selector, nest_partner
from ..frontends.orion.ast import ChangeOp, OpKind
from .base import AbstractGenerator, Backend, Statement

CONVERT_CODES = {
    ScalarType.DOUBLE: 1,
    ScalarType.STRING: 2,
    ScalarType.IDENTIFIER: 2,
    ScalarType.BOOLEAN: 8,
    ScalarType.TIMESTAMP: 9,
    ScalarType.INTEGER: 16,
}


def q(name: str) -> str:
    return json.dumps(name)


def js_value(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Timestamp):
        return f"new Date({q(v.isoformat())})"
    if isinstance(v, (int, float, str)):
        return orjson.dumps(v).decode()
    if isinstance(v, dict):
        return "{" + ", ".join(f"{q(k)}: {js_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(js_value(x) for x in v) + "]"
    if isinstance(v, SetValue):
        return js_value(list(v.items))
    if isinstance(v, MapValue):
        return "{" + ", ".join(f"{q(str(k))}: {js_value(x)}" for k, x in v.items) + "}"
    raise TypeError(f"no literal for {v!r}")


def obj(pairs) -> str:
    return "{" + ", ".join(f"{k}: {v}" for k, v in pairs) + "}"


def variation_filter(t: SchemaType, var_id: int) -> str:
    """$exists pattern selecting exactly the instances of one variation."""
    own = [f.name for f in t.variation(var_id).features]
    absent: List[str] = []
    for v in t.variations:
        for f in v.features:
            if f.name not in own and f.name not in absent:
                absent.append(f.name)
    pairs = [(q(n), "{$exists: true}") for n in own] + [(q(n), "{$exists: false}") for n in absent]
    return obj(pairs)


def scope_filter(t: SchemaType, scope: Sequence[int]) -> str:
    if not scope:
        return "{}"
    if len(scope) == 1:
        return variation_filter(t, scope[0])
    return "{$or: [" + ", ".join(variation_filter(t, v) for v in scope) + "]}"


class DocumentGenerator(AbstractGenerator):
    backend = Backend.DOCUMENT
    extension = "js"

    def translate(self, before: Schema, after: Schema, op: ChangeOp, index: int) -> List[Statement]:
        self._db = before.name
        self._before, self._after, self._op, self._index = before, after, op, index
        handler = getattr(self, "_" + op.kind.value, None)
        if handler is None:
            raise UnsupportedTargetOp(f"{op.kind.value} has no document translation")
        if op.type_names and op.flavor is TypeKind.RELATIONSHIP:
            raise UnsupportedTargetOp("document stores have no relationship types")
        return handler(op)

    # statement builders
    def coll(self, type_name: str) -> str:
        return f"{self._db}.{type_name}"

    def update_many(self, type_name: str, update: str, filter: str = "{}") -> Statement:
        c = self.coll(type_name)
        return self.statement(f"{c}.updateMany({filter}, {update})", self._op, self._index,
                              collection=c, filter=filter, update=update)

    def call(self, text: str, type_name: Optional[str] = None) -> Statement:
        return self.statement(text, self._op, self._index,
                              collection=self.coll(type_name) if type_name else None)

    def pipeline(self, type_name: str, stages: Sequence[str]) -> Statement:
        return self.call(f"{self.coll(type_name)}.aggregate([{', '.join(stages)}])", type_name)

    def defaults(self, features: Sequence[Feature], schema: Schema) -> str:
        return obj((q(f.name), js_value(feature_default(schema, f))) for f in features)

    def targets(self):
        for target in expand_selector(self._before, self._op):
            if isinstance(self._before.get_type(target.type_name), RelationshipType):
                raise UnsupportedTargetOp("document stores have no relationship types")
            yield target

    # schema types
    def _add_type(self, op: ChangeOp):
        t = self._after.get_type(op.type_names[0])
        out = [self.call(f"{self._db}.createCollection({q(t.name)})", t.name)]
        if t.all_features():
            out.append(self.update_many(t.name, f"[{{$addFields: {self.defaults(t.all_features(), self._after)}}}]"))
        return out

    def _delete_type(self, op: ChangeOp):
        return [self.call(f"{self.coll(op.type_names[0])}.drop()", op.type_names[0])]

    def _rename_type(self, op: ChangeOp):
        name = op.type_names[0]
        return [self.call(f"{self.coll(name)}.renameCollection({q(op.new_name)})", name)]

    def _project(self, source: str, dest: str, names: Sequence[str]) -> Statement:
        projection = obj((q(n), "1") for n in names)
        return self.pipeline(source, [f"{{$project: {projection}}}", f"{{$out: {q(dest)}}}"])

    def _extract_type(self, op: ChangeOp):
        return [self._project(op.type_names[0], op.new_name, op.selector.features)]

    def _split_type(self, op: ChangeOp):
        name = op.type_names[0]
        out = [self._project(name, p.name, p.features) for p in op.parts]
        return out + [self.call(f"{self.coll(name)}.drop()", name)]

    def _merge_type(self, op: ChangeOp):
        merges = [self.pipeline(n, [f"{{$merge: {{into: {q(op.new_name)}}}}}"]) for n in op.type_names]
        return merges + [self.call(f"{self.coll(n)}.drop()", n) for n in op.type_names]

    # variations
    def _delvar(self, op: ChangeOp):
        t = self._before.get_type(op.type_names[0])
        return [self.call(f"{self.coll(t.name)}.remove({variation_filter(t, op.variations[0])})", t.name)]

    def _adapt(self, op: ChangeOp):
        t = self._before.get_type(op.type_names[0])
        source, target = op.variations
        have = [f.name for f in t.variation_features(source)]
        want = t.variation_features(target)
        drop = [n for n in have if n not in {f.name for f in want}]
        add = [f for f in want if f.name not in have]
        stages = []
        if drop:
            stages.append("{$unset: [" + ", ".join(q(n) for n in drop) + "]}")
        if add:
            stages.append(f"{{$addFields: {self.defaults(add, self._before)}}}")
        if not stages:
            return [self.call("// no field changes", t.name)]
        return [self.update_many(t.name, "[" + ", ".join(stages) + "]", variation_filter(t, source))]

    def _union(self, op: ChangeOp):
        t = self._after.get_type(op.type_names[0])
        fields = obj((q(f.name), f"{{$ifNull: [{q('$' + f.name)}, {js_value(feature_default(self._after, f))}]}}")
                     for f in t.all_features())
        return [self.update_many(t.name, f"[{{$addFields: {fields}}}]")]

    # features
    def _delete_feature(self, op: ChangeOp):
        out = []
        for target in self.targets():
            t = self._before.get_type(target.type_name)
            out.append(self.update_many(t.name, f"{{$unset: {{{q(target.feature)}: \"\"}}}}",
                                        scope_filter(t, target.variations)))
        return out

    def _rename_feature(self, op: ChangeOp):
        out = []
        for target in self.targets():
            t = self._before.get_type(target.type_name)
            out.append(self.update_many(t.name, f"{{$rename: {{{q(target.feature)}: {q(op.new_name)}}}}}",
                                        scope_filter(t, target.variations)))
        return out

    def _copy_feature(self, op: ChangeOp):
        (src,) = list(self.targets())
        f = self._before.get_type(src.type_name).feature(src.feature)
        dest = op.target_type
        if op.join is None:
            value = q("$" + f.name) if src.type_name == dest else js_value(feature_default(self._before, f))
            out = [self.update_many(dest, f"[{{$addFields: {{{q(op.new_name)}: {value}}}}}]")]
        else:
            lookup = obj([("from", q(src.type_name)), ("localField", q(op.join.target_feature)),
                          ("foreignField", q(op.join.source_feature)), ("as", q("_src"))])
            out = [self.pipeline(dest, [
                f"{{$lookup: {lookup}}}",
                f"{{$addFields: {{{q(op.new_name)}: {{$first: {q('$_src.' + f.name)}}}}}}}",
                "{$addFields: {\"_src\": \"$$REMOVE\"}}",
                f"{{$out: {q(dest)}}}",
            ])]
        if op.kind is OpKind.MOVE_FEATURE:
            out.append(self.update_many(src.type_name, f"{{$unset: {{{q(f.name)}: \"\"}}}}"))
        return out

    _move_feature = _copy_feature

    def _nest_feature(self, op: ChangeOp):
        e1, ag, _ = nest_partner(self._before, op)
        renames = obj((q(n), q(f"{ag.name}.{n}")) for n in op.selector.features)
        return [self.update_many(e1.name, f"{{$rename: {renames}}}")]

    def _unnest_feature(self, op: ChangeOp):
        e1, ag, _ = nest_partner(self._before, op)
        renames = obj((q(f"{ag.name}.{n}"), q(n)) for n in op.selector.features)
        return [self.update_many(e1.name, f"{{$rename: {renames}}}")]

    # attributes
    def _add_attr(self, op: ChangeOp):
        return [self.update_many(t.type_name,
                                 f"[{{$addFields: {self.defaults([renamed(op.feature, t.feature)], self._after)}}}]")
                for t in self.targets()]

    def _convert(self, op: ChangeOp):
        code = CONVERT_CODES[op.scalar]
        out = []
        for target in self.targets():
            t = self._before.get_type(target.type_name)
            conv = f"{{$convert: {{input: {q('$' + target.feature)}, to: {code}}}}}"
            out.append(self.update_many(t.name, f"[{{$set: {{{q(target.feature)}: {conv}}}}}]",
                                        scope_filter(t, target.variations)))
        return out

    _cast_attr = _convert
    _cast_ref = _convert

    # references
    def _add_ref(self, op: ChangeOp):
        (target,) = list(self.targets())
        ref = op.feature
        if op.join is None:
            return [self.update_many(target.type_name,
                                     f"[{{$addFields: {{{q(target.feature)}: {'[]' if ref.cardinality.many else 'null'}}}}}]")]
        key = key_name(self._before, ref.target) or op.join.source_feature
        lookup = obj([("from", q(ref.target)), ("localField", q(op.join.target_feature)),
                      ("foreignField", q(op.join.source_feature)), ("as", q(target.feature))])
        keys = q(f"${target.feature}.{key}")
        value = keys if ref.cardinality.many else f"{{$first: {keys}}}"
        return [self.pipeline(target.type_name, [
            f"{{$lookup: {lookup}}}",
            f"{{$addFields: {{{q(target.feature)}: {value}}}}}",
            f"{{$out: {q(target.type_name)}}}",
        ])]

    def _mult(self, op: ChangeOp):
        out = []
        for target in self.targets():
            t = self._before.get_type(target.type_name)
            path = q("$" + target.feature)
            if op.cardinality.many:
                value = f"{{$cond: [{{$isArray: {path}}}, {path}, {{$cond: [{{$eq: [{path}, null]}}, [], [{path}]]}}]}}"
            else:
                value = f"{{$cond: [{{$isArray: {path}}}, {{$arrayElemAt: [{path}, 0]}}, {path}]}}"
            out.append(self.update_many(t.name, f"[{{$set: {{{q(target.feature)}: {value}}}}}]",
                                        scope_filter(t, target.variations)))
        return out

    _mult_ref = _mult
    _mult_aggr = _mult

    def _morph_ref(self, op: ChangeOp):
        out = []
        for target in self.targets():
            rf = self._before.get_type(target.type_name).feature(target.feature)
            new = op.new_name or rf.name
            key = key_name(self._before, rf.target) or "_id"
            lookup = obj([("from", q(rf.target)), ("localField", q(rf.name)),
                          ("foreignField", q(key)), ("as", q("_ref"))])
            value = q("$_ref") if rf.cardinality.many else "{$first: \"$_ref\"}"
            drop = [q("_ref")] + ([q(rf.name)] if new != rf.name else [])
            out.append(self.pipeline(target.type_name, [
                f"{{$lookup: {lookup}}}",
                f"{{$addFields: {{{q(new)}: {value}}}}}",
                "{$unset: [" + ", ".join(drop) + "]}",
                f"{{$out: {q(target.type_name)}}}",
            ]))
        return out

    # aggregates
    def _add_aggr(self, op: ChangeOp):
        (target,) = list(self.targets())
        ag = self._after.get_type(target.type_name).feature(target.feature)
        return [self.update_many(target.type_name, f"[{{$addFields: {self.defaults([ag], self._after)}}}]")]

    def _morph_aggr(self, op: ChangeOp):
        out = []
        for target in self.targets():
            ag: Aggregate = self._before.get_type(target.type_name).feature(target.feature)
            new = op.new_name or ag.name
            key = key_name(self._before, ag.target) or "_id"
            src, dst = self.coll(target.type_name), self.coll(ag.target)
            many = ag.cardinality.many
            body = [
                f"{src}.find({{{q(ag.name)}: {{$exists: true}}}}).forEach(function (doc) {{",
                f"  var keys = [].concat(doc[{q(ag.name)}] || []).map(function (e) {{",
                f"    {dst}.insert(e);",
                f"    return e[{q(key)}];",
                "  });",
                f"  delete doc[{q(ag.name)}];",
                f"  doc[{q(new)}] = {'keys' if many else 'keys.length ? keys[0] : null'};",
                f"  {src}.save(doc);",
                "})",
            ]
            out.append(self.call("\n".join(body), target.type_name))
        return out
