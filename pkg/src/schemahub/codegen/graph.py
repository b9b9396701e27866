"""Neo4j Cypher statements.

Entity types are node labels, relationship types are edge types and a
reference is an edge named after it, the same layout ``migrate`` uses for
graph datasets. Aggregates have no property representation, so operations
on aggregates or on embedded types are reported unsupported.
"""
import json
import re
from typing import Any, Iterable, List, Sequence

from ..core.errors import UnsupportedTargetOp
from ..core.model import (
    Aggregate,
    Attribute,
    Feature,
    Reference,
    RelationshipType,
    ScalarType,
    Schema,
    SchemaType,
    TypeKind,
    renamed,
)
from ..data.migrate import feature_default
from ..data.values import MapValue, SetValue, Timestamp
from ..engine.evolution import expand_selector
from ..frontends.orion.ast import ChangeOp, OpKind
from .base import AbstractGenerator, Backend, Statement

CASTS = {
    ScalarType.STRING: "toString",
    ScalarType.IDENTIFIER: "toString",
    ScalarType.INTEGER: "toInteger",
    ScalarType.DOUBLE: "toFloat",
    ScalarType.BOOLEAN: "toBoolean",
    ScalarType.TIMESTAMP: "datetime",
}

_UNSUPPORTED = frozenset({
    OpKind.NEST_FEATURE, OpKind.UNNEST_FEATURE, OpKind.CAST_REF, OpKind.MULT_REF, OpKind.MORPH_REF,
    OpKind.ADD_AGGR, OpKind.MULT_AGGR, OpKind.MORPH_AGGR,
})

_PLAIN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def ident(name: str) -> str:
    return name if _PLAIN.match(name) else "`" + name.replace("`", "``") + "`"


def cypher_value(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Timestamp):
        return f"datetime({json.dumps(v.isoformat())})"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, SetValue):
        return cypher_value(list(v.items))
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(cypher_value(x) for x in v) + "]"
    if isinstance(v, MapValue):
        return "{" + ", ".join(f"{ident(str(k))}: {cypher_value(x)}" for k, x in v.items) + "}"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{ident(k)}: {cypher_value(x)}" for k, x in v.items()) + "}"
    raise TypeError(f"no literal for {v!r}")


def pattern(t: SchemaType, var: str = "n") -> str:
    if isinstance(t, RelationshipType):
        return f"()-[{var}:{ident(t.name)}]->()"
    return f"({var}:{ident(t.name)})"


def property_names(features: Iterable[Feature]) -> List[str]:
    return [f.name for f in features if isinstance(f, Attribute)]


def variation_where(t: SchemaType, var_id: int, var: str = "n") -> str:
    """Presence test selecting one variation; references are edges and do not count."""
    own = property_names(t.variation(var_id).features)
    absent: List[str] = []
    for v in t.variations:
        for name in property_names(v.features):
            if name not in own and name not in absent:
                absent.append(name)
    terms = [f"{var}.{ident(n)} IS NOT NULL" for n in own] + [f"{var}.{ident(n)} IS NULL" for n in absent]
    return " AND ".join(terms) or "true"


def scope_where(t: SchemaType, scope: Sequence[int], var: str = "n") -> str:
    if not scope:
        return ""
    if len(scope) == 1:
        return " WHERE " + variation_where(t, scope[0], var)
    return " WHERE " + " OR ".join(f"({variation_where(t, v, var)})" for v in scope)


def constraint_name(type_name: str, feature: str) -> str:
    return f"{type_name}_{feature}_unique".lower()


class GraphGenerator(AbstractGenerator):
    backend = Backend.GRAPH
    extension = "cypher"

    def translate(self, before: Schema, after: Schema, op: ChangeOp, index: int) -> List[Statement]:
        if op.kind in _UNSUPPORTED:
            raise UnsupportedTargetOp(f"{op.kind.value} has no graph translation")
        self._before, self._after, self._op, self._index = before, after, op, index
        for name in op.type_names:
            t = before.find_type(name) or after.get_type(name)
            if t.kind is TypeKind.ENTITY and not t.root:
                raise UnsupportedTargetOp(f"{name} is embedded, not a node label")
        return getattr(self, "_" + op.kind.value)(op)

    def stmt(self, text: str) -> Statement:
        return self.statement(text + ";", self._op, self._index)

    def note(self, text: str) -> Statement:
        return self.statement(f"// {text}", self._op, self._index)

    def value(self, f: Feature, schema: Schema = None) -> str:
        return cypher_value(feature_default(schema or self._after, f, graph=True))

    def targets(self, attributes_only: bool = False):
        for target in expand_selector(self._before, self._op):
            t = self._before.get_type(target.type_name)
            if t.kind is TypeKind.ENTITY and not t.root:
                raise UnsupportedTargetOp(f"{t.name} is embedded, not a node label")
            f = t.feature(target.feature)
            if isinstance(f, Aggregate):
                raise UnsupportedTargetOp("aggregates have no graph property form")
            if attributes_only and isinstance(f, Reference):
                raise UnsupportedTargetOp("reference edges cannot be copied between types")
            yield target

    # schema types
    def _add_type(self, op: ChangeOp):
        t = self._after.get_type(op.type_names[0])
        if isinstance(t, RelationshipType):
            raise UnsupportedTargetOp("edge types come into being with their first edge")
        attrs = [f for f in t.all_features() if isinstance(f, Attribute)]
        keys = t.key_attributes()
        out = [self.stmt(f"CREATE CONSTRAINT {constraint_name(t.name, k.name)} IF NOT EXISTS "
                         f"FOR {pattern(t)} REQUIRE n.{ident(k.name)} IS UNIQUE") for k in keys]
        if not keys and attrs:
            out.append(self.stmt(f"CREATE INDEX {t.name.lower()}_{attrs[0].name.lower()} IF NOT EXISTS "
                                 f"FOR {pattern(t)} ON (n.{ident(attrs[0].name)})"))
        if not attrs:
            return out or [self.note("no properties to fill")]
        defaults = ", ".join(f"{ident(f.name)}: {self.value(f)}" for f in attrs)
        out.append(self.stmt(f"MATCH {pattern(t)} SET n += {{{defaults}}}"))
        return out

    def _delete_type(self, op: ChangeOp):
        return [self._drop_all(self._before.get_type(op.type_names[0]))]

    def _set_type(self, t: SchemaType, new: str) -> Statement:
        return self.stmt(f"MATCH {pattern(t, 'r')} CALL apoc.refactor.setType(r, {json.dumps(new)}) "
                         "YIELD output RETURN count(output)")

    def _relabel(self, t: SchemaType, new: str) -> Statement:
        if isinstance(t, RelationshipType):
            return self._set_type(t, new)
        return self.stmt(f"MATCH {pattern(t)} REMOVE n:{ident(t.name)} SET n:{ident(new)}")

    def _rename_type(self, op: ChangeOp):
        return [self._relabel(self._before.get_type(op.type_names[0]), op.new_name)]

    def _copy_out(self, t: SchemaType, new: str, names: Sequence[str]) -> Statement:
        props = ", ".join(f"m.{ident(n)} = n.{ident(n)}" for n in names if isinstance(t.feature(n), Attribute))
        sets = f" SET {props}" if props else ""
        if isinstance(t, RelationshipType):
            return self.stmt(f"MATCH (s)-[n:{ident(t.name)}]->(e) CREATE (s)-[m:{ident(new)}]->(e){sets}")
        return self.stmt(f"MATCH {pattern(t)} CREATE (m:{ident(new)}){sets}")

    def _drop_all(self, t: SchemaType) -> Statement:
        if isinstance(t, RelationshipType):
            return self.stmt(f"MATCH {pattern(t)} DELETE n")
        return self.stmt(f"MATCH {pattern(t)} DETACH DELETE n")

    def _extract_type(self, op: ChangeOp):
        t = self._before.get_type(op.type_names[0])
        return [self._copy_out(t, op.new_name, op.selector.features)]

    def _split_type(self, op: ChangeOp):
        t = self._before.get_type(op.type_names[0])
        return [self._copy_out(t, p.name, p.features) for p in op.parts] + [self._drop_all(t)]

    def _merge_type(self, op: ChangeOp):
        sources = [self._before.get_type(n) for n in op.type_names]
        copies = []
        for t in sources:
            if isinstance(t, RelationshipType):
                copies.append(self.stmt(f"MATCH (s)-[n:{ident(t.name)}]->(e) "
                                        f"CREATE (s)-[m:{ident(op.new_name)}]->(e) SET m = properties(n)"))
            else:
                copies.append(self.stmt(f"MATCH {pattern(t)} CREATE (m:{ident(op.new_name)}) SET m = properties(n)"))
        return copies + [self._drop_all(t) for t in sources]

    # variations
    def _delvar(self, op: ChangeOp):
        t = self._before.get_type(op.type_names[0])
        where = variation_where(t, op.variations[0])
        detach = "" if isinstance(t, RelationshipType) else "DETACH "
        return [self.stmt(f"MATCH {pattern(t)} WHERE {where} {detach}DELETE n")]

    def _adapt(self, op: ChangeOp):
        t = self._before.get_type(op.type_names[0])
        source, target = op.variations
        have = property_names(t.variation_features(source))
        want = [f for f in t.variation_features(target) if isinstance(f, Attribute)]
        drop = [n for n in have if n not in {f.name for f in want}]
        add = [f for f in want if f.name not in have]
        if not drop and not add:
            return [self.note("no property changes")]
        text = f"MATCH {pattern(t)} WHERE {variation_where(t, source)}"
        if drop:
            text += " REMOVE " + ", ".join(f"n.{ident(n)}" for n in drop)
        if add:
            text += " SET " + ", ".join(f"n.{ident(f.name)} = {self.value(f, self._before)}" for f in add)
        return [self.stmt(text)]

    def _union(self, op: ChangeOp):
        t = self._after.get_type(op.type_names[0])
        attrs = [f for f in t.all_features() if isinstance(f, Attribute)]
        if not attrs:
            return [self.note("no properties to fill")]
        sets = ", ".join(f"n.{ident(f.name)} = coalesce(n.{ident(f.name)}, {self.value(f)})" for f in attrs)
        return [self.stmt(f"MATCH {pattern(t)} SET {sets}")]

    # features
    def _delete_feature(self, op: ChangeOp):
        out = []
        for target in self.targets():
            t = self._before.get_type(target.type_name)
            f = t.feature(target.feature)
            where = scope_where(t, target.variations)
            if isinstance(f, Reference):
                out.append(self.stmt(f"MATCH (n:{ident(t.name)})-[r:{ident(f.name)}]->(){where} DELETE r"))
            else:
                out.append(self.stmt(f"MATCH {pattern(t)}{where} REMOVE n.{ident(f.name)}"))
        return out

    def _rename_feature(self, op: ChangeOp):
        out = []
        for target in self.targets():
            t = self._before.get_type(target.type_name)
            f = t.feature(target.feature)
            where = scope_where(t, target.variations)
            if isinstance(f, Reference):
                out.append(self.stmt(f"MATCH (n:{ident(t.name)})-[r:{ident(f.name)}]->(){where} "
                                     f"CALL apoc.refactor.setType(r, {json.dumps(op.new_name)}) "
                                     "YIELD output RETURN count(output)"))
                continue
            old, new = ident(f.name), ident(op.new_name)
            test = f"n.{old} IS NOT NULL"
            where = f"{where} AND {test}" if where else f" WHERE {test}"
            out.append(self.stmt(f"MATCH {pattern(t)}{where} SET n.{new} = n.{old} REMOVE n.{old}"))
        return out

    def _copy_feature(self, op: ChangeOp):
        (src,) = list(self.targets(attributes_only=True))
        t1 = self._before.get_type(src.type_name)
        t2 = self._before.get_type(op.target_type)
        if t2.kind is TypeKind.ENTITY and not t2.root:
            raise UnsupportedTargetOp(f"{t2.name} is embedded, not a node label")
        f = t1.feature(src.feature)
        new = ident(op.new_name)
        if op.join is not None:
            join = f"a.{ident(op.join.source_feature)} = b.{ident(op.join.target_feature)}"
            out = [self.stmt(f"MATCH {pattern(t1, 'a')} MATCH {pattern(t2, 'b')} WHERE {join} "
                             f"SET b.{new} = a.{ident(f.name)}")]
        elif t1.name == t2.name:
            out = [self.stmt(f"MATCH {pattern(t1)} SET n.{new} = n.{ident(f.name)}")]
        else:
            out = [self.stmt(f"MATCH {pattern(t2)} SET n.{new} = {self.value(f, self._before)}")]
        if op.kind is OpKind.MOVE_FEATURE:
            out.append(self.stmt(f"MATCH {pattern(t1)} REMOVE n.{ident(f.name)}"))
        return out

    _move_feature = _copy_feature

    # attributes
    def _add_attr(self, op: ChangeOp):
        out = []
        for target in self.targets():
            t = self._before.get_type(target.type_name)
            f = renamed(op.feature, target.feature)
            out.append(self.stmt(f"MATCH {pattern(t)} SET n.{ident(f.name)} = {self.value(f)}"))
        return out

    def _cast_attr(self, op: ChangeOp):
        fn = CASTS[op.scalar]
        out = []
        for target in self.targets():
            t = self._before.get_type(target.type_name)
            name = ident(target.feature)
            out.append(self.stmt(f"MATCH {pattern(t)}{scope_where(t, target.variations)} "
                                 f"SET n.{name} = {fn}(n.{name})"))
        return out

    def _promote_attr(self, op: ChangeOp):
        out = []
        for target in self.targets():
            t = self._before.get_type(target.type_name)
            var = "r" if isinstance(t, RelationshipType) else "n"
            out.append(self.stmt(f"CREATE CONSTRAINT {constraint_name(t.name, target.feature)} IF NOT EXISTS "
                                 f"FOR {pattern(t, var)} REQUIRE {var}.{ident(target.feature)} IS UNIQUE"))
        return out

    def _demote_attr(self, op: ChangeOp):
        return [self.stmt(f"DROP CONSTRAINT {constraint_name(t.type_name, t.feature)} IF EXISTS")
                for t in self.targets()]

    # references
    def _add_ref(self, op: ChangeOp):
        (target,) = list(self.targets())
        t = self._before.get_type(target.type_name)
        if isinstance(t, RelationshipType):
            raise UnsupportedTargetOp("edges cannot own references")
        ref: Reference = renamed(op.feature, target.feature)
        if op.join is None:
            return [self.note(f"{t.name}.{ref.name} starts with no edges")]
        dest = self._before.get_type(ref.target)
        props = ", ".join(f"{ident(a.name)}: {self.value(a)}" for a in ref.attributes)
        edge = f"[:{ident(ref.name)}" + (f" {{{props}}}" if props else "") + "]"
        join = f"b.{ident(op.join.source_feature)} = a.{ident(op.join.target_feature)}"
        return [self.stmt(f"MATCH {pattern(t, 'a')} MATCH {pattern(dest, 'b')} WHERE {join} "
                          f"CREATE (a)-{edge}->(b)")]
