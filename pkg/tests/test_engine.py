from dataclasses import replace

import pytest

from schemahub.core.errors import AmbiguousSelector, PreconditionViolation, UsingMismatch
from schemahub.core.model import UNBOUNDED, Aggregate, Cardinality, Reference, ScalarType
from schemahub.core.validation import validate
from schemahub.engine.evolution import Target, apply_op, apply_script, expand_selector
from schemahub.frontends.orion import ChangeScript, parse_orion


def script_for(schema, *lines):
    head = f"T operations\nUsing {schema.name}:{schema.version}\n"
    return parse_orion(head + "\n".join(lines))


def run(schema, *lines):
    outcome = apply_script(schema, script_for(schema, *lines))
    if not outcome.ok:
        raise outcome.failed_at[1]
    return outcome.schema


def test_sales_evolution(sales, sales_ops):
    outcome = apply_script(sales, sales_ops)
    assert outcome.ok
    assert len(outcome.log) == 15
    evolved = outcome.schema
    assert evolved.version == 2
    assert set(evolved.type_names) == {
        "Employee", "PersonalData", "Summary", "Sale", "SeasonExercise", "Company", "Address", "Media",
    }
    assert validate(evolved) == []


def test_sales_evolution_details(sales, sales_ops):
    evolved = apply_script(sales, sales_ops).schema
    employee = evolved.get_type("Employee")
    assert len(employee.variations) == 1
    assert isinstance(employee.feature("privateData"), Reference)
    assert employee.feature("email") is None
    assert evolved.get_type("PersonalData").feature("email") is not None
    assert {f.name for f in evolved.get_type("Address").all_features()} == {"country", "city", "postcode", "street"}
    assert evolved.get_type("Summary").feature("isCompleted").type is ScalarType.BOOLEAN
    assert evolved.get_type("Sale").feature("profits").type is ScalarType.DOUBLE
    assert evolved.get_type("Sale").feature("isActive") is None
    assert evolved.get_type("Company").feature("code").key
    assert evolved.get_type("Summary").feature("saleId").target == "Sale"


def test_rename_onto_existing_type_fails_first_op(sales):
    outcome = apply_script(sales, script_for(sales, "RENAME ENTITY Sale TO Salesperson"))
    assert not outcome.ok
    index, err = outcome.failed_at
    assert index == 0 and err.op_index == 0
    assert err.clause == "n ∉ T.names"
    assert outcome.schema is sales


def test_failure_keeps_prefix(sales):
    outcome = apply_script(sales, script_for(sales, "DELETE Sale::isActive", "DELETE ENTITY Ghost"))
    assert outcome.failed_at[0] == 1
    assert [i for i, _ in outcome.log] == [0]
    assert outcome.schema.get_type("Sale").feature("isActive") is None
    assert outcome.schema.version == sales.version


def test_using_mismatch(sales):
    script = parse_orion("T operations\nUsing Sales_department:7\nDELETE ENTITY Sale")
    with pytest.raises(UsingMismatch):
        apply_script(sales, script)


def test_empty_script_bumps_version(sales):
    outcome = apply_script(sales, ChangeScript("T", (sales.name, sales.version)))
    assert outcome.ok and outcome.log == ()
    assert outcome.schema.version == sales.version + 1


def test_delete_referenced_type_breaks_well_formedness(sales):
    with pytest.raises(PreconditionViolation) as info:
        run(sales, "DELETE ENTITY SeasonExercise")
    assert "well-formed" in info.value.clause


def test_adapt_drops_source_variation(sales):
    evolved = run(sales, "ADAPT ENTITY Salesperson::v1 TO v2")
    assert [v.var_id for v in evolved.get_type("Salesperson").variations] == [2]


def test_adapt_to_itself(sales):
    with pytest.raises(PreconditionViolation):
        run(sales, "ADAPT ENTITY Salesperson::v2 TO v2")


def test_delvar_keeps_some_variation(shop):
    evolved = run(shop, "DELVAR ENTITY Customer::v1")
    with pytest.raises(PreconditionViolation):
        run(evolved, "DELVAR ENTITY Customer::v2")


def test_nest_moves_features(sales):
    evolved = run(sales, "NEST Salesperson::email TO personalData")
    assert evolved.get_type("Salesperson").feature("email") is None
    assert evolved.get_type("PersonalData").feature("email") is not None


def test_unnest_needs_single_aggregate(sales):
    with pytest.raises(PreconditionViolation):
        run(sales, "UNNEST Salesperson::scheduledAt FROM sales")


def test_wildcard_cast(sales):
    evolved = run(sales, "CAST ATTR *::profits TO Double")
    assert evolved.get_type("Sale").feature("profits").type is ScalarType.DOUBLE
    assert evolved.get_type("SaleSummary").feature("profits").type is ScalarType.DOUBLE
    assert evolved.get_type("Salesperson").variation(2).feature("profits").type is ScalarType.DOUBLE


def test_wildcard_expansion_skips_types_lacking_the_feature(sales):
    (op,) = script_for(sales, "CAST ATTR *::profits TO Double").ops
    assert expand_selector(sales, op) == [
        Target("Salesperson", "profits"), Target("SaleSummary", "profits"), Target("Sale", "profits"),
    ]


def test_wildcard_matching_nothing_fails(sales):
    with pytest.raises(PreconditionViolation):
        run(sales, "CAST ATTR *::ghost TO Double")


def test_cast_keeps_compatible_constraint(sales):
    evolved = run(sales, "CAST ATTR Sale::profits TO Double")
    assert evolved.get_type("Sale").feature("profits").constraint is not None
    stringly = run(sales, "CAST ATTR Sale::profits TO String")
    assert stringly.get_type("Sale").feature("profits").constraint is None


def test_promote_yields_two_keys(sales, sales_ops):
    evolved = apply_script(sales, sales_ops).schema
    keys = [f.name for f in evolved.get_type("Company").all_features() if getattr(f, "key", False)]
    assert keys == ["id", "code"]


def test_promote_twice_fails(shop):
    with pytest.raises(PreconditionViolation):
        run(shop, "PROMOTE ATTR Order::id")


def test_mult_ref(stackoverflow):
    evolved = run(stackoverflow, "MULT REF Posts::Tags TO +")
    assert evolved.get_type("Posts").feature("Tags").cardinality == Cardinality(1, UNBOUNDED)


def test_add_aggr_inline(sales):
    evolved = run(sales, "ADD AGGR PersonalData::address:{country:String}& AS Address")
    address = evolved.entity("Address")
    assert address is not None and not address.root
    assert evolved.get_type("PersonalData").feature("address") == Aggregate("address", "Address")


def test_add_aggr_to_root_entity_fails(sales):
    with pytest.raises(PreconditionViolation):
        run(sales, "ADD AGGR Sale::extra: Sale&")


def test_morph_aggr_and_back(sales):
    evolved = run(sales, "MORPH AGGR Salesperson::personalData TO privateData")
    ref = evolved.get_type("Salesperson").feature("privateData")
    assert isinstance(ref, Reference) and ref.target == "PersonalData"
    back = run(evolved, "MORPH REF Salesperson::privateData TO personalData")
    assert isinstance(back.get_type("Salesperson").feature("personalData"), Aggregate)


def test_morph_ref_of_shared_target_fails(shop):
    with pytest.raises(PreconditionViolation):
        run(shop, "ADD REF Order::buyer: String & TO Customer", "ADD REF Order::payer: String & TO Customer",
            "MORPH REF Order::buyer TO buyer")


def test_union_relationship(stackoverflow):
    evolved = run(stackoverflow, "UNION RELATIONSHIP Rel_Comments")
    rel = evolved.relationship("Rel_Comments")
    assert len(rel.variations) == 1
    assert set(rel.variations[0].names) == {"UserId", "Text", "UserDisplayName"}


def test_flavor_must_match(stackoverflow):
    with pytest.raises(PreconditionViolation):
        run(stackoverflow, "UNION ENTITY Rel_Comments")


def test_stackoverflow_evolution(stackoverflow, stackoverflow_ops):
    outcome = apply_script(stackoverflow, stackoverflow_ops)
    assert outcome.ok, outcome.failed_at
    comments = outcome.schema.relationship("comments")
    names = {f.name for f in comments.all_features()}
    assert {"CommentTypeId", "UserReputation", "LastEditDate", "KarmaCount"} <= names
    assert not {"PostId", "UserId"} & names
    assert comments.feature("Score").type is ScalarType.DOUBLE


def test_scoped_rename(shop):
    evolved = run(shop, "RENAME Customer(v1)::phone TO contact")
    customer = evolved.get_type("Customer")
    assert customer.variation(1).feature("contact") is not None
    assert customer.variation(2).feature("contact") is None


def test_scoped_rename_of_common_feature_pushes_it_down(shop):
    evolved = run(shop, "RENAME Customer(v2)::name TO fullName")
    customer = evolved.get_type("Customer")
    assert customer.common_feature("name") is None
    assert customer.variation(1).feature("name") is not None
    assert customer.variation(2).feature("fullName") is not None


def test_scoped_rename_that_would_clash_is_ambiguous(shop):
    evolved = run(shop, "RENAME Customer(v1)::phone TO tag")
    with pytest.raises(AmbiguousSelector):
        run(evolved, "RENAME Customer(v2)::vip TO tag")


def test_scoped_selector_not_allowed_for_add(shop):
    (op,) = script_for(shop, "ADD ATTR Customer::extra: String").ops
    scoped = replace(op, selector=replace(op.selector, variations=(1,)))
    with pytest.raises(PreconditionViolation):
        apply_op(shop, scoped)


def test_split_and_merge(shop):
    split = run(shop, "SPLIT ENTITY Order TO Head { id, customerId } AND Body { id, total }")
    assert not split.has_type("Order")
    merged = run(split, "MERGE ENTITIES Head, Body TO Order")
    assert {f.name for f in merged.get_type("Order").all_features()} == {"id", "customerId", "total"}


def test_extract_keeps_source(shop):
    evolved = run(shop, "EXTRACT ENTITY Order::id, total TO Totals")
    assert evolved.has_type("Order") and evolved.has_type("Totals")


def test_move_with_join(shop):
    evolved = run(shop, "MOVE Customer::points TO Order::points WHERE id=customerId")
    assert evolved.get_type("Customer").feature("points") is None
    assert evolved.get_type("Order").feature("points").type is ScalarType.INTEGER


def test_copy_with_unknown_join_feature(shop):
    with pytest.raises(PreconditionViolation):
        run(shop, "COPY Customer::points TO Order::points WHERE id=ghost")
