import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schemahub.core.errors import AthenaSyntaxError, DuplicateName, InvalidSchema, UnknownFSet, UnknownTargetType
from schemahub.core.model import (
    UNBOUNDED,
    Attribute,
    Cardinality,
    EntityType,
    ListType,
    RangeConstraint,
    Reference,
    RegexConstraint,
    ScalarType,
    Schema,
    StructuralVariation,
)
from schemahub.core.validation import schemas_equal_except, validate
from schemahub.frontends.athena import parse_athena, print_athena


def test_sales_header_and_types(sales):
    assert (sales.name, sales.version) == ("Sales_department", 1)
    assert len(sales.entity_types) == 5
    assert sum(1 for e in sales.entity_types if e.root) == 3
    assert len(sales.get_type("Salesperson").variations) == 2


def test_reference_with_value_type(sales):
    ref = sales.get_type("Sale").feature("exercises")
    assert ref == Reference("exercises", "SeasonExercise", Cardinality(1, UNBOUNDED),
                            value_type=ScalarType.STRING)


def test_constraints_and_modifiers(sales):
    sp = sales.get_type("Salesperson")
    assert sp.feature("id").key
    assert isinstance(sp.feature("email").constraint, RegexConstraint)
    assert sales.get_type("Sale").feature("profits").constraint == RangeConstraint(0, 9999)
    assert sales.get_type("PersonalData").feature("postcode").optional
    assert sales.get_type("Sale").feature("types").type == ListType(ScalarType.STRING)


def test_fset_declared_after_use_is_inlined(sales):
    assert [f.name for f in sales.get_type("SeasonExercise").common][-2:] == ["createdAt", "updatedAt"]


def test_round_trip(sales):
    text = print_athena(sales)
    assert "Variation 1" in text and "Variation 2" in text
    assert schemas_equal_except(parse_athena(text), sales, set())


def test_round_trip_keeps_counts(reddit):
    again = parse_athena(print_athena(reddit))
    assert [v.count for v in again.get_type("Comments").variations] == \
           [v.count for v in reddit.get_type("Comments").variations]


def test_relationship_and_reference_attributes(stackoverflow):
    rel = stackoverflow.relationship("Rel_Comments")
    assert rel is not None and len(rel.variations) == 5
    ref = stackoverflow.get_type("Users").feature("rel_comments")
    assert ref.attributes == (Attribute("Text", ScalarType.STRING),)


def test_number_is_integer():
    schema = parse_athena("Schema s:1\nRoot entity A { n: Number }")
    assert schema.get_type("A").feature("n").type is ScalarType.INTEGER
    assert "n: Integer" in print_athena(schema)


def test_empty_input_is_a_syntax_error():
    with pytest.raises(AthenaSyntaxError) as info:
        parse_athena("")
    assert (info.value.line, info.value.column) == (1, 1)


def test_syntax_error_position():
    with pytest.raises(AthenaSyntaxError) as info:
        parse_athena("Schema s:1\nRoot entity A {\n  x String\n}")
    assert info.value.line == 3


def test_unknown_fset():
    with pytest.raises(UnknownFSet):
        parse_athena("Schema s:1\nRoot entity A { x: String } + missing")


def test_duplicate_type():
    with pytest.raises(DuplicateName):
        parse_athena("Schema s:1\nRoot entity A { x: String }\nRoot entity A { y: String }")


def test_dangling_target_strict_and_lenient():
    text = "Schema s:1\nRoot entity A { r: Ref<Ghost>& }"
    with pytest.raises(UnknownTargetType):
        parse_athena(text)
    loose = parse_athena(text, strict=False)
    assert len(validate(loose)) == 1


def test_printing_an_invalid_schema_fails(sales):
    with pytest.raises(InvalidSchema):
        print_athena(sales.without_types("SeasonExercise"))


_names = st.sampled_from(["alpha", "beta", "gamma", "delta", "eps"])
_scalars = st.sampled_from([s for s in ScalarType if s is not ScalarType.IDENTIFIER])


@st.composite
def flat_schemas(draw):
    names = draw(st.lists(_names, min_size=1, max_size=4, unique=True))
    feats = tuple(Attribute(n, draw(_scalars), optional=draw(st.booleans())) for n in names)
    split = draw(st.integers(min_value=0, max_value=len(feats)))
    variations = (StructuralVariation(1, feats[split:]), StructuralVariation(2))
    return Schema("gen", draw(st.integers(1, 9)), (EntityType("T", feats[:split], variations),))


@settings(max_examples=50, deadline=None)
@given(flat_schemas())
def test_generated_round_trip(schema):
    assert schemas_equal_except(parse_athena(print_athena(schema)), schema, set())
