import logging
from pathlib import Path

from lark import v_args

from ...core.errors import OrionSyntaxError, UnknownOperationKeyword
from ...core.model import Aggregate, Attribute, Reference, TypeKind
from ..common import FeatureTransformer, load_parser, names, run_parser, scalar_of, word_at
from .ast import ChangeOp, ChangeScript, FeatureSelector, JoinCondition, OpKind, SplitPart

log = logging.getLogger(__name__)

GRAMMAR = Path(__file__).with_name("orion.lark")

STATEMENT_KEYWORDS = frozenset({
    "ADD", "DELETE", "RENAME", "EXTRACT", "SPLIT", "MERGE", "DELVAR", "ADAPT", "UNION",
    "COPY", "MOVE", "NEST", "UNNEST", "CAST", "PROMOTE", "DEMOTE", "MULT", "MORPH",
})


@v_args(inline=True)
class _OrionTransformer(FeatureTransformer):
    error_cls = OrionSyntaxError

    def start(self, header, using, *ops):
        return ChangeScript(header, using, tuple(ops))

    def header(self, name):
        return str(name)

    def using(self, name, version):
        return str(name), int(version)

    # schema types
    def entity_flavor(self):
        return TypeKind.ENTITY

    def relationship_flavor(self):
        return TypeKind.RELATIONSHIP

    def embedded(self):
        return True

    def add_type(self, flavor, name, features, embedded=None):
        return ChangeOp(OpKind.ADD_TYPE, flavor, (str(name),), body=tuple(features),
                        root=flavor is TypeKind.ENTITY and not embedded)

    def delete_type(self, flavor, name):
        return ChangeOp(OpKind.DELETE_TYPE, flavor, (str(name),))

    def rename_type(self, flavor, name, new):
        return ChangeOp(OpKind.RENAME_TYPE, flavor, (str(name),), new_name=str(new))

    def extract_type(self, flavor, name, feats, new):
        return ChangeOp(OpKind.EXTRACT_TYPE, flavor, (str(name),),
                        selector=FeatureSelector(str(name), feats), new_name=str(new))

    def split_type(self, flavor, name, first, second):
        return ChangeOp(OpKind.SPLIT_TYPE, flavor, (str(name),), parts=(first, second))

    def split_part(self, name, feats):
        return SplitPart(str(name), feats)

    def merge_type(self, flavor, first, second, new):
        return ChangeOp(OpKind.MERGE_TYPE, flavor, (str(first), str(second)), new_name=str(new))

    # variations
    def varid(self, n):
        return int(n)

    def delvar(self, flavor, name, var_id):
        return ChangeOp(OpKind.DELVAR, flavor, (str(name),), variations=(var_id,))

    def adapt(self, flavor, name, source, target):
        return ChangeOp(OpKind.ADAPT, flavor, (str(name),), variations=(source, target))

    def union(self, flavor, name):
        return ChangeOp(OpKind.UNION, flavor, (str(name),))

    # features
    def delete_feature(self, selector):
        return ChangeOp(OpKind.DELETE_FEATURE, selector=selector)

    def rename_feature(self, selector, new):
        return ChangeOp(OpKind.RENAME_FEATURE, selector=selector, new_name=str(new))

    def copy_feature(self, selector, target, new, join=None):
        return ChangeOp(OpKind.COPY_FEATURE, selector=selector, target_type=str(target),
                        new_name=str(new), join=join)

    def move_feature(self, selector, target, new, join=None):
        return ChangeOp(OpKind.MOVE_FEATURE, selector=selector, target_type=str(target),
                        new_name=str(new), join=join)

    def nest(self, selector, aggregate):
        return ChangeOp(OpKind.NEST_FEATURE, selector=selector, aggregate=str(aggregate))

    def unnest(self, selector, aggregate):
        return ChangeOp(OpKind.UNNEST_FEATURE, selector=selector, aggregate=str(aggregate))

    # attributes
    def add_attr(self, selector, dtype, constraint=None):
        attr = Attribute(selector.feature, dtype, constraint=constraint)
        return ChangeOp(OpKind.ADD_ATTR, selector=selector, feature=attr)

    def cast_attr(self, selector, scalar):
        return ChangeOp(OpKind.CAST_ATTR, selector=selector, scalar=scalar_of(scalar))

    def promote_attr(self, selector):
        return ChangeOp(OpKind.PROMOTE_ATTR, selector=selector)

    def demote_attr(self, selector):
        return ChangeOp(OpKind.DEMOTE_ATTR, selector=selector)

    # references
    def ref_scalar(self, scalar):
        return scalar_of(scalar)

    def ref_attributes(self, features):
        return tuple(self.ref_attrs(features))

    def add_ref(self, selector, body, card, target, join=None):
        ref = Reference(selector.feature, str(target), card,
                        value_type=None if isinstance(body, tuple) else body,
                        attributes=body if isinstance(body, tuple) else ())
        return ChangeOp(OpKind.ADD_REF, selector=selector, feature=ref, join=join)

    def cast_ref(self, selector, scalar):
        return ChangeOp(OpKind.CAST_REF, selector=selector, scalar=scalar_of(scalar))

    def mult_ref(self, selector, card):
        return ChangeOp(OpKind.MULT_REF, selector=selector, cardinality=card)

    def morph_ref(self, selector, new=None):
        return ChangeOp(OpKind.MORPH_REF, selector=selector, new_name=new)

    # aggregates
    def aggr_alias(self):
        return None

    def add_aggr_inline(self, selector, features, card, _alias, target):
        aggr = Aggregate(selector.feature, str(target), card)
        return ChangeOp(OpKind.ADD_AGGR, selector=selector, feature=aggr,
                        body=tuple(features), inline=True)

    def add_aggr_named(self, selector, target, card):
        aggr = Aggregate(selector.feature, str(target), card)
        return ChangeOp(OpKind.ADD_AGGR, selector=selector, feature=aggr)

    def mult_aggr(self, selector, card):
        return ChangeOp(OpKind.MULT_AGGR, selector=selector, cardinality=card)

    def morph_aggr(self, selector, new=None):
        return ChangeOp(OpKind.MORPH_AGGR, selector=selector, new_name=new)

    def morph_to(self, name):
        return str(name)

    # selectors
    def selector(self, head, feats):
        type_name, variations = head
        return FeatureSelector(type_name, feats, variations)

    def single_selector(self, head, qname):
        type_name, variations = head
        return FeatureSelector(type_name, (qname,), variations)

    def named_type(self, name, variations=()):
        return str(name), tuple(variations)

    def wildcard(self):
        return None, ()

    def var_list(self, *ids):
        return ids

    def qname_list(self, *qnames):
        return tuple(qnames)

    def qname(self, *parts):
        return ".".join(names(parts))

    def where(self, source, target):
        return JoinCondition(source, target)


def parse_orion(text: str, origin: str = "<memory>") -> ChangeScript:
    try:
        script = run_parser(load_parser(str(GRAMMAR)), _OrionTransformer(text, origin), text, origin,
                            OrionSyntaxError)
    except OrionSyntaxError as e:
        raise _keyword_error(e, text) from None
    log.debug("parsed %s: %d ops", origin, len(script.ops))
    return script


def parse_orion_file(path) -> ChangeScript:
    p = Path(path)
    return parse_orion(p.read_text(encoding="utf-8"), str(p))


def _keyword_error(e: OrionSyntaxError, text: str) -> OrionSyntaxError:
    # an uppercase word where a statement could start is an unknown operation
    word = word_at(text, e.line, e.column)
    starts_statement = bool(STATEMENT_KEYWORDS & set(e.expected))
    if word.isupper() and word.isidentifier() and word not in STATEMENT_KEYWORDS and starts_statement:
        return UnknownOperationKeyword(f"unknown operation keyword {word!r}", e.line, e.column,
                                       e.expected, e.origin)
    return e
