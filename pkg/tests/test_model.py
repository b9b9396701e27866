from dataclasses import replace

import pytest

from schemahub.core.errors import UnknownType, UnknownVariation
from schemahub.core.model import (
    UNBOUNDED,
    Aggregate,
    Attribute,
    Cardinality,
    EntityType,
    Reference,
    RelationshipType,
    ScalarType,
    Schema,
    StructuralVariation,
)
from schemahub.core.validation import (
    AGGREGATES_ACYCLIC,
    AGGREGATES_NON_ROOT,
    COMMON_DISJOINT,
    REFS_TO_ENTITIES,
    SOME_ROOT,
    SOME_TYPES,
    UNIQUE_ENTITY_NAMES,
    features_of,
    schemas_equal_except,
    validate,
)


def test_sales_schema_is_well_formed(sales):
    assert validate(sales) == []


def test_dangling_reference_is_one_violation(sales):
    broken = sales.without_types("SeasonExercise")
    violations = validate(broken)
    assert [v.rule for v in violations] == [REFS_TO_ENTITIES]
    assert violations[0].path == "Sale.exercises"


def test_empty_schema_has_no_types():
    assert [v.rule for v in validate(Schema("empty"))] == [SOME_TYPES]


def test_entities_need_a_root():
    schema = Schema("s", 1, (EntityType("A", (Attribute("x", ScalarType.STRING),), is_root=False),))
    assert SOME_ROOT in {v.rule for v in validate(schema)}


def test_relationships_only_schema_is_valid():
    rel = RelationshipType("Knows", (Attribute("since", ScalarType.TIMESTAMP),))
    assert validate(Schema("g", 1, (), (rel,))) == []


def test_duplicate_entity_names_are_reported():
    a = EntityType("A", (Attribute("x", ScalarType.STRING),))
    assert UNIQUE_ENTITY_NAMES in {v.rule for v in validate(Schema("s", 1, (a, a)))}


def test_aggregate_of_root_entity_is_reported():
    a = EntityType("A", (Aggregate("b", "B"),))
    b = EntityType("B", (Attribute("x", ScalarType.STRING),))
    assert {v.rule for v in validate(Schema("s", 1, (a, b)))} == {AGGREGATES_NON_ROOT}


def test_embedding_cycle_is_reported():
    root = EntityType("Root", (Aggregate("a", "A"),))
    a = EntityType("A", (Aggregate("b", "B"),), is_root=False)
    b = EntityType("B", (Aggregate("a", "A"),), is_root=False)
    violations = validate(Schema("s", 1, (root, a, b)))
    assert [(v.rule, v.path) for v in violations] == [(AGGREGATES_ACYCLIC, "A -> B -> A")]


def test_self_embedding_is_reported():
    a = EntityType("A", (Aggregate("next", "A"),), is_root=False)
    root = EntityType("Root", (Attribute("x", ScalarType.STRING),))
    assert [v.path for v in validate(Schema("s", 1, (root, a)))] == ["A -> A"]


def test_common_and_variation_features_overlap():
    x = Attribute("x", ScalarType.STRING)
    a = EntityType("A", (x,), (StructuralVariation(1, (x,)),))
    assert COMMON_DISJOINT in {v.rule for v in validate(Schema("s", 1, (a,)))}


def test_features_of_salesperson(sales):
    names = [f.name for f in features_of(sales, "Salesperson")]
    assert set(names) == {"id", "teamCode", "email", "personalData", "sales", "profits"}
    assert names[:4] == ["id", "teamCode", "email", "personalData"]


def test_features_of_sale_includes_inlined_fset(sales):
    names = [f.name for f in features_of(sales, "Sale")]
    assert len(names) == 8
    assert names[-2:] == ["createdAt", "updatedAt"]


def test_features_of_unknown_type(sales):
    with pytest.raises(UnknownType):
        features_of(sales, "Ghost")


def test_equality_excluding_renamed_type(sales):
    t = sales.get_type("Salesperson")
    renamed = sales.with_type(replace(t, name="Employee"), replacing="Salesperson")
    assert schemas_equal_except(sales, renamed, {"Salesperson", "Employee"})
    assert not schemas_equal_except(sales, renamed)


def test_equality_notices_missing_type(sales):
    assert not schemas_equal_except(sales, sales.without_types("Sale"), set())


def test_cardinality_symbols():
    assert Cardinality.from_symbol("+") == Cardinality(1, UNBOUNDED)
    assert Cardinality(0, 1).symbol == "?"
    assert str(Cardinality(0, UNBOUNDED)) == "(0, -1)"
    assert Cardinality(1, UNBOUNDED).many


def test_illegal_cardinality():
    with pytest.raises(ValueError):
        Cardinality(2, 3)


def test_variation_lookup(sales):
    t = sales.get_type("Salesperson")
    assert [f.name for f in t.variation_features(2)][-2:] == ["sales", "profits"]
    with pytest.raises(UnknownVariation):
        t.variation(7)


def test_retarget_rewrites_references(sales):
    moved = sales.retarget("Sale", "Purchase")
    ref = moved.get_type("SaleSummary").feature("saleId")
    assert isinstance(ref, Reference) and ref.target == "Purchase"
    assert moved.types_targeting("Purchase") == ["SaleSummary"]


def test_key_attribute(sales):
    assert sales.get_type("Sale").key_attribute().name == "id"
    assert sales.get_type("PersonalData").key_attribute() is None
