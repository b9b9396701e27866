"""Reference data updater.

``migrate`` replays a change script against stored records, one operation at
a time, next to the schema it evolves. Each operation's data effect is
written against the schema before and after that operation; records are
visited in stored order so results are deterministic.
"""
import copy
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

from ..core.errors import (
    CastError,
    DataError,
    JoinAmbiguity,
    MissingKey,
    MultiplicityError,
    UniquenessViolation,
    UnknownType,
)
from ..core.model import (
    Aggregate,
    Attribute,
    Feature,
    Reference,
    RelationshipType,
    Schema,
    SchemaType,
    renamed,
)
from ..engine.evolution import Target, apply_op, apply_script, expand_selector, nest_partner
from ..frontends.orion.ast import ChangeOp, ChangeScript, OpKind
from ..frontends.orion.printer import print_op
from .classify import classify_variation
from .database import Database, Dataset, StoreMode
from .values import RESERVED, Mode, Record, canonical_text, cast_value, default_value

log = logging.getLogger(__name__)

Locator = Tuple[str, int]


@dataclass
class OpReport:
    index: int
    operation: str
    touched: int = 0
    created: int = 0
    deleted: int = 0
    warnings: int = 0

    def line(self) -> str:
        return (f"{self.index}\t{self.operation}\t{self.touched}\t{self.created}"
                f"\t{self.deleted}\t{self.warnings}")


@dataclass
class MigrationReport:
    ops: List[OpReport] = field(default_factory=list)

    @property
    def warnings(self) -> int:
        return sum(r.warnings for r in self.ops)

    def lines(self) -> List[str]:
        return [r.line() for r in self.ops]


# ----------------------------------------------------------------- helpers

def embedded(value: Any) -> Iterator[Record]:
    if isinstance(value, dict):
        yield value
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, dict):
                yield v


def key_name(schema: Schema, type_name: str) -> Optional[str]:
    t = schema.find_type(type_name)
    key = t.key_attribute() if t else None
    return key.name if key else None


def _join_key(v: Any):
    return type(v).__name__, canonical_text(v)


def _rename_field(record: Record, old: str, new: str, value: Any = None, replace_value: bool = False):
    items = list(record.items())
    record.clear()
    for k, v in items:
        if k == old:
            record[new] = value if replace_value else v
        else:
            record[k] = v


def feature_default(schema: Schema, f: Feature, graph: bool = False, seen=frozenset()) -> Any:
    if isinstance(f, Attribute):
        return default_value(f.type)
    if isinstance(f, Reference):
        return [] if f.cardinality.many else None
    if f.cardinality.lower == 0:
        return None
    inner = default_record(schema, f.target, graph, seen)
    return [inner] if f.cardinality.many else inner


def default_record(schema: Schema, type_name: str, graph: bool = False, seen=frozenset()) -> Record:
    t = schema.find_type(type_name)
    if t is None or type_name in seen:
        return Record()
    seen = seen | {type_name}
    feats = t.variation_features(t.variations[0].var_id)
    return Record((f.name, feature_default(schema, f, graph, seen)) for f in feats
                  if not (graph and isinstance(f, Reference)))


def stored(schema: Schema, name: str, mode: StoreMode) -> bool:
    t = schema.find_type(name)
    if t is None:
        return False
    if isinstance(t, RelationshipType):
        return mode is StoreMode.GRAPH
    return t.root


# --------------------------------------------------------------- migration

class _Migration:
    def __init__(self, db: Database, mode: Mode):
        self.db = db
        self.mode = mode
        self.graph = db.mode is StoreMode.GRAPH
        self.before: Schema = None
        self.after: Schema = None
        self.row: OpReport = None
        self._to = None

    # instance access
    def instances(self, type_name: str, schema: Optional[Schema] = None) -> List[Tuple[Locator, Record]]:
        """Every stored or embedded record of ``type_name``, in stored order."""
        schema = schema or self.before
        out: List[Tuple[Locator, Record]] = []
        for name, ds in self.db.collections.items():
            if schema.find_type(name) is None:
                continue
            for i, r in enumerate(ds.records):
                self._walk(schema, name, r, type_name, out, (name, i))
        return out

    def _walk(self, schema, type_name, record, want, out, loc):
        if type_name == want:
            out.append((loc, record))
        t = schema.find_type(type_name)
        if t is None:
            return
        for f in t.all_features():
            if isinstance(f, Aggregate):
                for child in embedded(record.get(f.name)):
                    self._walk(schema, f.target, child, want, out, loc)

    def in_scope(self, record: Record, t: SchemaType, scope) -> bool:
        return not scope or classify_variation(record, t, self.graph) in scope

    def scoped(self, target: Target) -> List[Tuple[Locator, Record]]:
        t = self.before.get_type(target.type_name)
        return [(loc, r) for loc, r in self.instances(t.name) if self.in_scope(r, t, target.variations)]

    def remove_instances(self, type_name: str, pred: Callable[[Record], bool]) -> int:
        removed = 0
        for name, ds in self.db.collections.items():
            if self.before.find_type(name) is None:
                continue
            if name == type_name:
                kept = [r for r in ds.records if not pred(r)]
                removed += len(ds.records) - len(kept)
                ds.records = kept
            for r in ds.records:
                removed += self._prune(name, r, type_name, pred)
        return removed

    def _prune(self, type_name, record, want, pred) -> int:
        removed = 0
        t = self.before.find_type(type_name)
        if t is None:
            return 0
        for f in t.all_features():
            if not isinstance(f, Aggregate):
                continue
            value = record.get(f.name)
            if f.target == want:
                if isinstance(value, list):
                    kept = [c for c in value if not (isinstance(c, dict) and pred(c))]
                    removed += len(value) - len(kept)
                    value = record[f.name] = kept
                elif isinstance(value, dict) and pred(value):
                    value = record[f.name] = None
                    removed += 1
            for child in embedded(value):
                removed += self._prune(f.target, child, want, pred)
        return removed

    def warn(self, msg: str, *args):
        self.row.warnings += 1
        log.warning("op %d: " + msg, self.row.index, *args)

    def strict(self) -> bool:
        return self.mode is Mode.STRICT

    def default(self, f: Feature, schema: Optional[Schema] = None) -> Any:
        return feature_default(schema or self.after, f, self.graph)

    def node_key(self, record: Record, type_name: str, loc: Locator) -> Any:
        name = key_name(self.before, type_name)
        k = record.get(name) if name else record.get("_id")
        if k is None:
            if self.strict():
                raise MissingKey(f"{type_name} instance has no key", record=loc)
            self.warn("%s instance %s#%d has no key; skipped", type_name, *loc)
        return k

    def edges(self, name: str) -> Dataset:
        return self.db.ensure(name)

    def tidy(self):
        """Drop empty edge datasets no reference of the current schema names."""
        if not self.graph:
            return
        refs = {f.name for t in self.after.types() for f in t.all_features() if isinstance(f, Reference)}
        for name in [n for n, ds in self.db.collections.items()
                     if not ds.records and n not in refs and not self.after.has_type(n)]:
            self.db.drop(name)

    # ---------------------------------------------------------- schema types
    def add_type(self, op: ChangeOp):
        name = op.type_names[0]
        if stored(self.after, name, self.db.mode):
            self.db.ensure(name)

    def delete_type(self, op: ChangeOp):
        self.row.deleted += self.db.drop(op.type_names[0])

    def rename_type(self, op: ChangeOp):
        self.db.rename(op.type_names[0], op.new_name)

    def project(self, record: Record, type_name: str) -> Record:
        t = self.after.get_type(type_name)
        out = Record((k, record[k]) for k in ("_out", "_in", "_id") if k in record)
        for f in t.all_features():
            if self.graph and isinstance(f, Reference):
                continue
            out[f.name] = copy.deepcopy(record[f.name]) if f.name in record else self.default(f)
        return out

    def _projected(self, source: str, new: str) -> None:
        if not stored(self.after, new, self.db.mode):
            return
        ds = self.db.ensure(new)
        for _, r in self.instances(source):
            ds.records.append(self.project(r, new))
            self.row.created += 1

    def extract_type(self, op: ChangeOp):
        self._projected(op.type_names[0], op.new_name)

    def split_type(self, op: ChangeOp):
        for part in op.parts:
            self._projected(op.type_names[0], part.name)
        self.row.deleted += self.db.drop(op.type_names[0])

    def merge_type(self, op: ChangeOp):
        first, second = op.type_names
        moved = self.db.collections.get(second)
        self.db.rename(first, op.new_name)
        self.db.collections.pop(second, None)
        if not stored(self.after, op.new_name, self.db.mode):
            self.row.deleted += self.db.drop(op.new_name) + (len(moved) if moved else 0)
            return
        ds = self.db.ensure(op.new_name)
        if moved:
            ds.records.extend(moved.records)

    # ------------------------------------------------------------ variations
    def delvar(self, op: ChangeOp):
        t = self.before.get_type(op.type_names[0])
        gone = op.variations[0]
        self.row.deleted += self.remove_instances(
            t.name, lambda r: classify_variation(r, t, self.graph) == gone)

    def _fill(self, record: Record, features, drop_extra: bool) -> bool:
        changed = False
        wanted = [f for f in features if not (self.graph and isinstance(f, Reference))]
        names = {f.name for f in wanted}
        if drop_extra:
            for k in [k for k in record if k not in names and k not in RESERVED]:
                del record[k]
                changed = True
        for f in wanted:
            if f.name not in record:
                record[f.name] = self.default(f, self.before)
                changed = True
        return changed

    def adapt(self, op: ChangeOp):
        t = self.before.get_type(op.type_names[0])
        source, target = op.variations
        features = t.variation_features(target)
        for _, r in self.instances(t.name):
            if classify_variation(r, t, self.graph) == source and self._fill(r, features, True):
                self.row.touched += 1

    def union(self, op: ChangeOp):
        t = self.after.get_type(op.type_names[0])
        features = t.variation_features(t.variations[0].var_id)
        for _, r in self.instances(t.name):
            if self._fill(r, features, False):
                self.row.touched += 1

    # -------------------------------------------------------------- features
    def _edge_owned(self, target: Target) -> Tuple[Dataset, set]:
        owners = set()
        for loc, r in self.scoped(target):
            k = self.node_key(r, target.type_name, loc)
            if k is not None:
                owners.add(_join_key(k))
        return self.edges(target.feature), owners

    def delete_feature(self, op: ChangeOp):
        for target in expand_selector(self.before, op):
            f = self.before.get_type(target.type_name).feature(target.feature)
            if self.graph and isinstance(f, Reference):
                ds, owners = self._edge_owned(target)
                kept = [e for e in ds.records if _join_key(e.get("_out")) not in owners]
                self.row.deleted += len(ds.records) - len(kept)
                ds.records = kept
                continue
            for _, r in self.scoped(target):
                if target.feature in r:
                    del r[target.feature]
                    self.row.touched += 1

    def rename_feature(self, op: ChangeOp):
        for target in expand_selector(self.before, op):
            f = self.before.get_type(target.type_name).feature(target.feature)
            if self.graph and isinstance(f, Reference):
                ds, owners = self._edge_owned(target)
                moving = [e for e in ds.records if _join_key(e.get("_out")) in owners]
                ds.records = [e for e in ds.records if _join_key(e.get("_out")) not in owners]
                self.edges(op.new_name).records.extend(moving)
                self.row.touched += len(moving)
                continue
            for _, r in self.scoped(target):
                if target.feature in r:
                    _rename_field(r, target.feature, op.new_name)
                    self.row.touched += 1

    def _join(self, sources, source_field: str, dest: Record, dest_field: str, loc: Locator,
              single: bool) -> List[Record]:
        if dest_field not in dest or dest[dest_field] is None:
            return []
        matches = sources.get(_join_key(dest[dest_field]), [])
        if single and len(matches) > 1:
            if self.strict():
                raise JoinAmbiguity(f"{len(matches)} records match {source_field}={dest[dest_field]!r}",
                                    record=loc)
            self.warn("%d join matches for %s#%d; first taken", len(matches), *loc)
            return matches[:1]
        return matches

    def _index(self, type_name: str, field_name: str) -> Dict[Any, List[Record]]:
        idx: Dict[Any, List[Record]] = {}
        for _, r in self.instances(type_name):
            if r.get(field_name) is not None:
                idx.setdefault(_join_key(r[field_name]), []).append(r)
        return idx

    def _copy_feature(self, op: ChangeOp):
        (src,) = expand_selector(self.before, op)
        f = self.before.get_type(src.type_name).feature(src.feature)
        if self.graph and isinstance(f, Reference):
            self.warn("reference %s stays on its edges", f.name)
            return
        g = renamed(f, op.new_name)
        dests = self.instances(op.target_type)
        values = []
        if op.join is not None:
            idx = self._index(src.type_name, op.join.source_feature)
            for loc, r2 in dests:
                m = self._join(idx, op.join.source_feature, r2, op.join.target_feature, loc, True)
                values.append(copy.deepcopy(m[0][f.name]) if m and f.name in m[0] else self.default(g))
        elif src.type_name == op.target_type:
            values = [copy.deepcopy(r[f.name]) if f.name in r else self.default(g) for _, r in dests]
        else:
            values = [self.default(g) for _ in dests]
        for (_, r2), v in zip(dests, values):
            r2[op.new_name] = v
            self.row.touched += 1
        if op.kind is OpKind.MOVE_FEATURE:
            for _, r1 in self.instances(src.type_name):
                if f.name in r1:
                    del r1[f.name]
                    self.row.touched += 1

    copy_feature = _copy_feature
    move_feature = _copy_feature

    def nest_feature(self, op: ChangeOp):
        e1, ag, e2 = nest_partner(self.before, op)
        target = self.after.get_type(e2.name)
        for _, r in self.instances(e1.name):
            moving = [n for n in op.selector.features if n in r]
            if not moving:
                continue
            children = list(embedded(r.get(ag.name)))
            if not children:
                # no embedded record to receive the values: create one
                child = {f.name: self.default(f) for f in target.variation_features(target.variations[0].var_id)}
                r[ag.name] = [child] if ag.cardinality.many else child
                children = [child]
                self.row.created += 1
            for name in moving:
                value = r.pop(name)
                for i, child in enumerate(children):
                    child[name] = value if i == 0 else copy.deepcopy(value)
                self.row.touched += 1
        for _, c in self.instances(e2.name, self.after):
            for name in op.selector.features:
                if name not in c:
                    c[name] = self.default(target.feature(name))

    def unnest_feature(self, op: ChangeOp):
        e1, ag, e2 = nest_partner(self.before, op)
        outer = self.after.get_type(e1.name)
        for _, r in self.instances(e1.name):
            inner = r.get(ag.name)
            for name in op.selector.features:
                if isinstance(inner, dict) and name in inner:
                    r[name] = inner.pop(name)
                else:
                    r[name] = self.default(outer.feature(name))
            self.row.touched += 1
        for _, c in self.instances(e2.name, self.after):
            for name in op.selector.features:
                c.pop(name, None)

    # ------------------------------------------------------------ attributes
    def add_attr(self, op: ChangeOp):
        for target in expand_selector(self.before, op):
            value = default_value(op.feature.type)
            for _, r in self.instances(target.type_name):
                if target.feature not in r:
                    r[target.feature] = copy.deepcopy(value)
                    self.row.touched += 1

    def _cast(self, value, loc: Locator):
        fallbacks: List[Any] = []
        try:
            out = cast_value(value, self._to, self.mode, fallbacks)
        except CastError as e:
            e.record = loc
            raise
        if fallbacks:
            self.row.warnings += 1
        return out

    def cast_attr(self, op: ChangeOp):
        self._to = op.scalar
        for target in expand_selector(self.before, op):
            for loc, r in self.scoped(target):
                if target.feature in r:
                    r[target.feature] = self._cast(r[target.feature], loc)
                    self.row.touched += 1

    def promote_attr(self, op: ChangeOp):
        for target in expand_selector(self.before, op):
            seen: Dict[Any, Locator] = {}
            for loc, r in self.instances(target.type_name):
                if target.feature not in r:
                    continue
                k = _join_key(r[target.feature])
                if k in seen:
                    raise UniquenessViolation(
                        f"{target.type_name}.{target.feature} value {r[target.feature]!r} is not unique",
                        record=loc)
                seen[k] = loc

    def demote_attr(self, op: ChangeOp):
        pass

    # ------------------------------------------------------------ references
    def add_ref(self, op: ChangeOp):
        (target,) = expand_selector(self.before, op)
        ref: Reference = renamed(op.feature, target.feature)
        origin_key = key_name(self.before, ref.target)
        idx = self._index(ref.target, op.join.source_feature) if op.join else {}
        edges = self.edges(ref.name) if self.graph else None
        for loc, r in self.instances(target.type_name):
            matches = []
            if op.join:
                matches = self._join(idx, op.join.source_feature, r, op.join.target_feature, loc,
                                     not ref.cardinality.many)
            keys = [m.get(origin_key) if origin_key else m.get(op.join.source_feature) for m in matches]
            if self.graph:
                owner = self.node_key(r, target.type_name, loc) if keys else None
                if owner is None:
                    continue
                for k in keys:
                    edge = Record(_out=owner, _in=k)
                    edge.update((a.name, default_value(a.type)) for a in ref.attributes)
                    edges.records.append(edge)
                    self.row.created += 1
                continue
            r[ref.name] = keys if ref.cardinality.many else (keys[0] if keys else None)
            self.row.touched += 1

    def cast_ref(self, op: ChangeOp):
        self._to = op.scalar
        for target in expand_selector(self.before, op):
            if self.graph:
                ds, owners = self._edge_owned(target)
                for i, e in enumerate(ds.records):
                    if _join_key(e.get("_out")) in owners and "_in" in e:
                        e["_in"] = self._cast(e["_in"], (ds.type_name, i))
                        self.row.touched += 1
                continue
            for loc, r in self.scoped(target):
                if target.feature not in r:
                    continue
                v = r[target.feature]
                r[target.feature] = [self._cast(x, loc) for x in v] if isinstance(v, list) else self._cast(v, loc)
                self.row.touched += 1

    def _reshape(self, record: Record, name: str, many: bool, loc: Locator) -> bool:
        if name not in record:
            return False
        v = record[name]
        if many and not isinstance(v, list):
            record[name] = [] if v is None else [v]
            return True
        if not many and isinstance(v, list):
            if len(v) > 1:
                if self.strict():
                    raise MultiplicityError(f"{name} holds {len(v)} values", record=loc)
                self.warn("%s#%d: %s narrowed to its first value", *loc, name)
            record[name] = v[0] if v else None
            return True
        return False

    def _mult(self, op: ChangeOp):
        many = op.cardinality.many
        for target in expand_selector(self.before, op):
            f = self.before.get_type(target.type_name).feature(target.feature)
            if self.graph and isinstance(f, Reference):
                if not many:
                    self._narrow_edges(target)
                continue
            for loc, r in self.scoped(target):
                if self._reshape(r, target.feature, many, loc):
                    self.row.touched += 1

    mult_ref = _mult
    mult_aggr = _mult

    def _narrow_edges(self, target: Target):
        ds, owners = self._edge_owned(target)
        seen = set()
        kept = []
        for i, e in enumerate(ds.records):
            k = _join_key(e.get("_out"))
            if k in owners and k in seen:
                if self.strict():
                    raise MultiplicityError(f"{target.feature} has several edges from {e.get('_out')!r}",
                                            record=(ds.type_name, i))
                self.warn("extra %s edge from %r dropped", target.feature, e.get("_out"))
                self.row.deleted += 1
                continue
            seen.add(k)
            kept.append(e)
        ds.records = kept

    def morph_ref(self, op: ChangeOp):
        for target in expand_selector(self.before, op):
            rf = self.before.get_type(target.type_name).feature(target.feature)
            new = op.new_name or rf.name
            key = key_name(self.before, rf.target)
            referenced: Dict[Any, Record] = {}
            for _, r in self.instances(rf.target):
                k = r.get(key) if key else r.get("_id")
                if k is not None:
                    referenced.setdefault(_join_key(k), r)
            if self.graph:
                self._morph_edges(target, rf, new, referenced)
                continue
            for loc, r in self.instances(target.type_name):
                if rf.name not in r:
                    continue
                v = r[rf.name]
                keys = v if isinstance(v, list) else ([] if v is None else [v])
                copies = []
                for k in keys:
                    hit = referenced.get(_join_key(k))
                    if hit is None:
                        self.warn("%s#%d: dangling %s reference %r", *loc, rf.name, k)
                        continue
                    copies.append(copy.deepcopy(hit))
                value = copies if isinstance(v, list) else (copies[0] if copies else None)
                _rename_field(r, rf.name, new, value, replace_value=True)
                self.row.touched += 1

    def _morph_edges(self, target: Target, rf: Reference, new: str, referenced):
        ds = self.edges(rf.name)
        for loc, r in self.instances(target.type_name):
            owner = self.node_key(r, target.type_name, loc)
            if owner is None:
                continue
            ok = _join_key(owner)
            mine = [e for e in ds.records if _join_key(e.get("_out")) == ok]
            ds.records = [e for e in ds.records if _join_key(e.get("_out")) != ok]
            copies = [copy.deepcopy(referenced[_join_key(e.get("_in"))]) for e in mine
                      if _join_key(e.get("_in")) in referenced]
            r[new] = copies if rf.cardinality.many else (copies[0] if copies else None)
            self.row.deleted += len(mine)
            self.row.touched += 1
        if not ds.records and self.after.relationship(rf.name) is None:
            self.db.drop(rf.name)

    # ------------------------------------------------------------ aggregates
    def add_aggr(self, op: ChangeOp):
        (target,) = expand_selector(self.before, op)
        ag = self.after.get_type(target.type_name).feature(target.feature)
        value = self.default(ag)
        for _, r in self.instances(target.type_name):
            if ag.name not in r:
                r[ag.name] = copy.deepcopy(value)
                self.row.touched += 1

    def morph_aggr(self, op: ChangeOp):
        for target in expand_selector(self.before, op):
            ag = self.before.get_type(target.type_name).feature(target.feature)
            new = op.new_name or ag.name
            key = key_name(self.before, ag.target)
            ds = self.db.ensure(ag.target)
            taken = {_join_key(r.get(key) if key else r.get("_id")) for r in ds.records}
            edges = self.edges(new) if self.graph else None
            for loc, r in self.instances(target.type_name):
                if ag.name not in r:
                    continue
                v = r[ag.name]
                keys = [self._hoist(child, ag.target, key, ds, taken, loc) for child in embedded(v)]
                if self.graph:
                    owner = self.node_key(r, target.type_name, loc)
                    del r[ag.name]
                    for k in keys:
                        if owner is not None:
                            edges.records.append(Record(_out=owner, _in=k))
                            self.row.created += 1
                else:
                    value = keys if isinstance(v, list) else (keys[0] if keys else None)
                    _rename_field(r, ag.name, new, value, replace_value=True)
                self.row.touched += 1

    def _hoist(self, child: Record, type_name: str, key: Optional[str], ds: Dataset, taken: set,
               loc: Locator):
        k = child.get(key) if key else None
        if k is None:
            if key is None and self.strict():
                raise MissingKey(f"{type_name} has no key attribute", record=loc)
            n = len(ds.records)
            while _join_key(f"{type_name}-{n}") in taken:
                n += 1
            k = f"{type_name}-{n}"
            child[key or "_id"] = k
            self.warn("generated key %s", k)
        taken.add(_join_key(k))
        ds.records.append(child)
        self.row.created += 1
        return k


_HANDLERS: Dict[OpKind, Callable[[_Migration, ChangeOp], None]] = {
    kind: getattr(_Migration, kind.value) for kind in OpKind
}


def _check_datasets(db: Database, schema: Schema):
    ref_names = {f.name for t in schema.types() for f in t.all_features() if isinstance(f, Reference)}
    for name in db.collections:
        if schema.has_type(name):
            continue
        if db.mode is StoreMode.GRAPH and name in ref_names:
            continue
        raise UnknownType(name)


def migrate(db: Database, schema: Schema, script: ChangeScript,
            mode: Mode = Mode.STRICT) -> Tuple[Database, MigrationReport]:
    """Apply ``script`` to a copy of ``db``; the input database is left untouched.

    The schema side runs first so a precondition violation aborts before any
    record is touched.
    """
    _check_datasets(db, schema)
    outcome = apply_script(schema, script)
    if not outcome.ok:
        raise outcome.failed_at[1]

    work = _Migration(copy.deepcopy(db), mode)
    report = MigrationReport()
    current = schema
    for i, op in enumerate(script.ops):
        work.before, work.after = current, apply_op(current, op)
        work.row = OpReport(i, print_op(op))
        try:
            _HANDLERS[op.kind](work, op)
        except DataError as e:
            log.error("op %d aborted: %s", i, e)
            raise e.at(i)
        report.ops.append(work.row)
        log.info("op %d: touched=%d created=%d deleted=%d warnings=%d", i, work.row.touched,
                 work.row.created, work.row.deleted, work.row.warnings)
        work.tidy()
        current = work.after
    return work.db, report
