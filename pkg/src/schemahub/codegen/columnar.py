"""Cassandra CQL statements.

Tables have a fixed column set, so anything beyond adding or dropping a
column reloads the table: export with COPY TO, try the new definition under
a scratch name and drop it, drop the original, recreate it with the new
definition, import with COPY FROM. Intermediate files live under the
configured migration directory as ``<table>_<opIndex>.csv``.
"""
from typing import List, Optional, Sequence

from ..core.errors import UnsupportedTargetOp
from ..core.model import (
    Aggregate,
    Attribute,
    DataType,
    Feature,
    ListType,
    MapType,
    Reference,
    RelationshipType,
    ScalarType,
    Schema,
    SetType,
    TupleType,
)
from ..data.migrate import key_name
from ..engine.evolution import expand_selector
from ..frontends.orion.ast import ChangeOp, OpKind
from .base import AbstractGenerator, Backend, Statement

_CQL_SCALARS = {
    ScalarType.STRING: "text",
    ScalarType.IDENTIFIER: "text",
    ScalarType.INTEGER: "int",
    ScalarType.DOUBLE: "double",
    ScalarType.BOOLEAN: "boolean",
    ScalarType.TIMESTAMP: "timestamp",
}

# kinds with no columnar translation
_UNSUPPORTED = frozenset({
    OpKind.DELVAR, OpKind.ADAPT, OpKind.UNION, OpKind.NEST_FEATURE, OpKind.UNNEST_FEATURE,
    OpKind.MULT_REF, OpKind.MORPH_REF, OpKind.MULT_AGGR, OpKind.MORPH_AGGR,
})


def table(name: str) -> str:
    return name.lower()


def cql_type(t: DataType) -> str:
    if isinstance(t, ScalarType):
        return _CQL_SCALARS[t]
    if isinstance(t, ListType):
        return f"list<{cql_type(t.element)}>"
    if isinstance(t, SetType):
        return f"set<{cql_type(t.element)}>"
    if isinstance(t, MapType):
        return f"map<{cql_type(t.key)}, {cql_type(t.value)}>"
    if isinstance(t, TupleType):
        return "tuple<" + ", ".join(cql_type(e) for e in t.elements) + ">"
    raise TypeError(f"no CQL type for {t!r}")


class ColumnarGenerator(AbstractGenerator):
    backend = Backend.COLUMNAR
    comment = "--"
    extension = "cql"

    def __init__(self, mig_dir: str = "./_mig/", **params):
        super().__init__(**params)
        self.mig_dir = mig_dir if mig_dir.endswith("/") else mig_dir + "/"

    def translate(self, before: Schema, after: Schema, op: ChangeOp, index: int) -> List[Statement]:
        if op.kind in _UNSUPPORTED:
            raise UnsupportedTargetOp(f"{op.kind.value} has no columnar translation")
        self._before, self._after, self._op, self._index = before, after, op, index
        for name in op.type_names:
            self._table_type(before if before.has_type(name) else after, name)
        if op.selector is not None and op.selector.variations:
            raise UnsupportedTargetOp("tables have no structural variations")
        return getattr(self, "_" + op.kind.value)(op)

    def _table_type(self, schema: Schema, name: str):
        t = schema.get_type(name)
        if isinstance(t, RelationshipType) or not t.root:
            raise UnsupportedTargetOp(f"{name} is not stored as a table")
        return t

    def stmt(self, text: str) -> Statement:
        return self.statement(text, self._op, self._index)

    def csv(self, name: str) -> str:
        return f"'{self.mig_dir}{table(name)}_{self._index}.csv'"

    def column_type(self, schema: Schema, f: Feature) -> str:
        if isinstance(f, Attribute):
            return cql_type(f.type)
        if isinstance(f, Reference):
            key = schema.get_type(f.target).key_attribute()
            inner = cql_type(f.value_type or (key.type if key else ScalarType.STRING))
            return f"list<{inner}>" if f.cardinality.many else inner
        inner = f"frozen<{table(f.target)}>"
        return f"list<{inner}>" if f.cardinality.many else inner

    def create_table(self, schema: Schema, name: str, as_name: Optional[str] = None) -> Statement:
        t = schema.get_type(name)
        features = [f for f in t.all_features()]
        cols = [f"{table(f.name)} {self.column_type(schema, f)}" for f in features]
        keys = [table(k.name) for k in t.key_attributes()]
        if not keys:
            # a keyless table still needs a primary key; an existing id column serves
            if not t.has_feature("id"):
                cols.insert(0, "id uuid")
            keys = ["id"]
        body = ", ".join(cols + [f"PRIMARY KEY ({', '.join(keys)})"])
        return self.stmt(f"CREATE TABLE {table(as_name or name)} ({body});")

    def columns(self, schema: Schema, name: str, names: Sequence[str] = (), keyed: bool = True) -> str:
        t = schema.get_type(name)
        keys = ([k.name for k in t.key_attributes()] or ["id"]) if keyed else []
        picked = list(dict.fromkeys(keys + list(names))) if names else [f.name for f in t.all_features()]
        return "(" + ", ".join(table(n) for n in picked) + ")"

    def copy_to(self, schema: Schema, name: str, file_for: str, names: Sequence[str] = (),
                keyed: bool = True) -> Statement:
        return self.stmt(f"COPY {table(name)} {self.columns(schema, name, names, keyed)} TO {self.csv(file_for)}"
                         " WITH HEADER = true;")

    def copy_from(self, schema: Schema, name: str, file_for: str, names: Sequence[str] = (),
                  keyed: bool = True) -> Statement:
        return self.stmt(f"COPY {table(name)} {self.columns(schema, name, names, keyed)} FROM {self.csv(file_for)}"
                         " WITH HEADER = true;")

    def reload(self, old: str, new: str) -> List[Statement]:
        # the new definition is tried under a scratch name before the original goes
        scratch = f"{table(new)}_mig{self._index}"
        return [
            self.copy_to(self._before, old, new),
            self.create_table(self._after, new, as_name=scratch),
            self.stmt(f"DROP TABLE {scratch};"),
            self.stmt(f"DROP TABLE {table(old)};"),
            self.create_table(self._after, new),
            self.copy_from(self._after, new, new),
        ]

    def owners(self):
        for target in expand_selector(self._before, self._op):
            self._table_type(self._before, target.type_name)
            yield target

    # schema types
    def _add_type(self, op: ChangeOp):
        return [self.create_table(self._after, op.type_names[0])]

    def _delete_type(self, op: ChangeOp):
        return [self.stmt(f"DROP TABLE {table(op.type_names[0])};")]

    def _rename_type(self, op: ChangeOp):
        return self.reload(op.type_names[0], op.new_name)

    def _extract_type(self, op: ChangeOp):
        src, new = op.type_names[0], op.new_name
        names = op.selector.features
        return [self.copy_to(self._before, src, new, names), self.create_table(self._after, new),
                self.copy_from(self._after, new, new, names)]

    def _split_type(self, op: ChangeOp):
        src = op.type_names[0]
        exports = [self.copy_to(self._before, src, p.name, p.features) for p in op.parts]
        creates = [self.create_table(self._after, p.name) for p in op.parts]
        imports = [self.copy_from(self._after, p.name, p.name, p.features) for p in op.parts]
        return exports + creates + imports + [self.stmt(f"DROP TABLE {table(src)};")]

    def _merge_type(self, op: ChangeOp):
        first, second = op.type_names
        exports = [self.copy_to(self._before, n, n) for n in (first, second)]
        imports = [self.copy_from(self._after, op.new_name, n, [f.name for f in self._before.get_type(n).all_features()])
                   for n in (first, second)]
        drops = [self.stmt(f"DROP TABLE {table(n)};") for n in (first, second)]
        return exports + [self.create_table(self._after, op.new_name)] + imports + drops

    # features
    def _delete_feature(self, op: ChangeOp):
        return [self.stmt(f"ALTER TABLE {table(t.type_name)} DROP {table(t.feature)};") for t in self.owners()]

    def _rename_feature(self, op: ChangeOp):
        out = []
        for target in self.owners():
            t = self._before.get_type(target.type_name)
            f = t.feature(target.feature)
            name = table(t.name)
            out += [
                self.stmt(f"ALTER TABLE {name} ADD {table(op.new_name)} {self.column_type(self._before, f)};"),
                self.copy_to(self._before, t.name, t.name, [f.name]),
                self.copy_from(self._after, t.name, t.name, [op.new_name]),
                self.stmt(f"ALTER TABLE {name} DROP {table(f.name)};"),
            ]
        return out

    def _copy_feature(self, op: ChangeOp):
        (src,) = list(self.owners())
        dest = self._table_type(self._before, op.target_type).name
        f = self._before.get_type(src.type_name).feature(src.feature)
        src_cols = [op.join.source_feature, f.name] if op.join else [f.name]
        dest_cols = [op.join.target_feature, op.new_name] if op.join else [op.new_name]
        out = [
            self.stmt(f"ALTER TABLE {table(dest)} ADD {table(op.new_name)} {self.column_type(self._before, f)};"),
            self.copy_to(self._before, src.type_name, dest, src_cols, keyed=op.join is None),
            self.copy_from(self._after, dest, dest, dest_cols, keyed=op.join is None),
        ]
        if op.kind is OpKind.MOVE_FEATURE:
            out.append(self.stmt(f"ALTER TABLE {table(src.type_name)} DROP {table(f.name)};"))
        return out

    _move_feature = _copy_feature

    # attributes
    def _add_attr(self, op: ChangeOp):
        return [self.stmt(f"ALTER TABLE {table(t.type_name)} ADD {table(t.feature)} {cql_type(op.feature.type)};")
                for t in self.owners()]

    def _reload_owners(self, op: ChangeOp):
        out = []
        for name in dict.fromkeys(t.type_name for t in self.owners()):
            out += self.reload(name, name)
        return out

    _cast_attr = _reload_owners
    _promote_attr = _reload_owners
    _demote_attr = _reload_owners
    _cast_ref = _reload_owners

    # references and aggregates
    def _add_ref(self, op: ChangeOp):
        (target,) = list(self.owners())
        ref = self._after.get_type(target.type_name).feature(target.feature)
        out = [self.stmt(f"ALTER TABLE {table(target.type_name)} ADD {table(ref.name)} "
                         f"{self.column_type(self._after, ref)};")]
        if op.join is not None:
            key = key_name(self._before, ref.target) or op.join.source_feature
            out += [
                self.copy_to(self._before, ref.target, target.type_name,
                             [op.join.source_feature, key], keyed=False),
                self.copy_from(self._after, target.type_name, target.type_name,
                               [op.join.target_feature, ref.name], keyed=False),
            ]
        return out

    def _add_aggr(self, op: ChangeOp):
        (target,) = list(self.owners())
        ag: Aggregate = self._after.get_type(target.type_name).feature(target.feature)
        inner = self._after.get_type(ag.target)
        fields = ", ".join(f"{table(f.name)} {self.column_type(self._after, f)}" for f in inner.all_features())
        return [
            self.stmt(f"CREATE TYPE IF NOT EXISTS {table(ag.target)} ({fields});"),
            self.stmt(f"ALTER TABLE {table(target.type_name)} ADD {table(ag.name)} "
                      f"{self.column_type(self._after, ag)};"),
        ]
