import pytest

from schemahub.core.errors import OrionSyntaxError, UnknownOperationKeyword
from schemahub.core.model import UNBOUNDED, Aggregate, Cardinality, ScalarType, TypeKind
from schemahub.frontends.orion import (
    FeatureSelector,
    JoinCondition,
    OpCategory,
    OpKind,
    parse_orion,
    print_op,
    print_orion,
)

HEAD = "S operations\nUsing s:1\n"


def one(line: str):
    (op,) = parse_orion(HEAD + line).ops
    return op


def test_sales_script(sales_ops):
    assert sales_ops.name == "Sales_ops"
    assert sales_ops.using == ("Sales_department", 1)
    assert len(sales_ops.ops) == 15
    first = sales_ops.ops[0]
    assert first.kind is OpKind.CAST_ATTR
    assert first.selector == FeatureSelector(None, ("profits",))
    assert first.scalar is ScalarType.DOUBLE


def test_sales_script_aggregates(sales_ops):
    inline = sales_ops.ops[3]
    assert inline.kind is OpKind.ADD_AGGR and inline.inline
    assert inline.feature == Aggregate("address", "Address", Cardinality(1, 1))
    media = sales_ops.ops[-1]
    assert media.feature.target == "Media"
    assert [f.name for f in media.body] == ["twitterProf", "fbProf", "webUrl", "ytProf"]


def test_add_entity_number_alias(sales_ops):
    company = sales_ops.ops[12]
    assert company.kind is OpKind.ADD_TYPE and company.root
    assert company.body[-1].type is ScalarType.INTEGER
    assert company.body[0].key


def test_reddit_script(reddit_ops):
    kinds = [op.kind for op in reddit_ops.ops]
    assert kinds.count(OpKind.DELVAR) == 4
    assert kinds.count(OpKind.ADAPT) == 11
    assert all(op.type_names == ("Comments",) for op in reddit_ops.ops)
    assert reddit_ops.ops[5].variations == (11, 5)


def test_stackoverflow_joins_and_flavors(stackoverflow_ops):
    ops = stackoverflow_ops.ops
    assert ops[0].selector.features == ("CreationDate", "LastAccessDate")
    assert ops[1].cardinality == Cardinality(1, UNBOUNDED)
    assert ops[2].join == JoinCondition("id", "PostId")
    assert ops[4].flavor is TypeKind.RELATIONSHIP
    assert ops[-1].kind is OpKind.RENAME_TYPE and ops[-1].new_name == "comments"


def test_round_trip(stackoverflow_ops, sales_ops, reddit_ops):
    for script in (stackoverflow_ops, sales_ops, reddit_ops):
        assert parse_orion(print_orion(script)) == script


def test_adapt_prints_one_line(reddit_ops):
    assert print_op(reddit_ops.ops[5]) == "ADAPT ENTITY Comments::v11 TO v5"


def test_variation_scoped_selector():
    op = one("RENAME Customer(v1,v3)::phone TO newPhone")
    assert op.selector == FeatureSelector("Customer", ("phone",), (1, 3))
    assert print_op(op) == "RENAME Customer(v1,v3)::phone TO newPhone"


def test_wildcard_with_variations_is_rejected():
    with pytest.raises(OrionSyntaxError):
        parse_orion(HEAD + "RENAME *(v1)::phone TO newPhone")


@pytest.mark.parametrize("line, kind", [
    ("DELETE ENTITY A", OpKind.DELETE_TYPE),
    ("EXTRACT ENTITY A::x, y TO B", OpKind.EXTRACT_TYPE),
    ("SPLIT ENTITY A TO B { x } AND C { y }", OpKind.SPLIT_TYPE),
    ("MERGE ENTITIES A, B TO C", OpKind.MERGE_TYPE),
    ("UNION ENTITY A", OpKind.UNION),
    ("MOVE A::x TO B::y WHERE id=aId", OpKind.MOVE_FEATURE),
    ("UNNEST A::x FROM ag", OpKind.UNNEST_FEATURE),
    ("DEMOTE ATTR A::id", OpKind.DEMOTE_ATTR),
    ("ADD REF A::r: String & TO B WHERE id=bId", OpKind.ADD_REF),
    ("ADD REF A::r: { since: Timestamp } * TO B", OpKind.ADD_REF),
    ("CAST REF A::r TO Integer", OpKind.CAST_REF),
    ("MORPH REF A::r TO ag", OpKind.MORPH_REF),
    ("MULT AGGR A::ag TO ?", OpKind.MULT_AGGR),
    ("ADD AGGR A::ag: B*", OpKind.ADD_AGGR),
    ("ADD ENTITY B: { x: String } EMBEDDED", OpKind.ADD_TYPE),
])
def test_operation_forms(line, kind):
    op = one(line)
    assert op.kind is kind
    assert one(print_op(op)) == op


def test_embedded_add_is_not_root():
    assert not one("ADD ENTITY B: { x: String } EMBEDDED").root


def test_categories_cover_the_taxonomy():
    assert len(OpKind) == 26
    assert sum(1 for k in OpKind if k.category is OpCategory.SCHEMA_TYPE) == 6
    assert sum(1 for k in OpKind if k.category is OpCategory.AGGREGATE) == 3


def test_unknown_keyword():
    with pytest.raises(UnknownOperationKeyword) as info:
        parse_orion(HEAD + "FROBNICATE ENTITY A")
    assert info.value.line == 3


def test_missing_using():
    with pytest.raises(OrionSyntaxError):
        parse_orion("S operations\nDELETE ENTITY A")


def test_comments_are_ignored():
    script = parse_orion(HEAD + "// nothing yet\nDELETE ENTITY A // trailing\n")
    assert len(script) == 1
