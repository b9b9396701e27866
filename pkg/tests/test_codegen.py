import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schemahub.codegen.base import Backend, GeneratedScript, GeneratorRegistry, Statement, default_registry
from schemahub.codegen.columnar import ColumnarGenerator
from schemahub.codegen.document import DocumentGenerator
from schemahub.codegen.graph import GraphGenerator
from schemahub.codegen.stacking import flatten, stack_optimize
from schemahub.core.errors import ConfigError, PreconditionViolation
from schemahub.frontends.orion import parse_orion

STACKED_SALE_SUMMARY = """
Sales_department.SaleSummary.bulkWrite([
 // RENAME SaleSummary::completedAt TO isCompleted
 {updateMany: {
    filter: {},
    update: {$rename: {"completedAt": "isCompleted" }}}},
 // CAST ATTR SaleSummary::isCompleted TO Boolean
 {updateMany: {
    filter: {},
    update: [{$set: { "isCompleted": { $convert:
                    { input: "$isCompleted", to: 8 }}}}]}}
])
"""

ADAPT_ELEVEN_TO_FIVE = """
reddit.Comments.updateMany({
  "archived":               {$exists: true},
  "distinguished":          {$exists: true},
  "downs":                  {$exists: true},
  "edited":                 {$exists: true},
  "name":                   {$exists: true},
  "score_hidden":           {$exists: true},
  "author_flair_css_class": {$exists: false},
  "author_flair_text":      {$exists: false}},
  [
    {$unset: ["distinguished"]}
  ])
"""


def squash(text: str) -> str:
    return "".join(text.split())


def script_for(schema, *lines):
    head = f"T operations\nUsing {schema.name}:{schema.version}\n"
    return parse_orion(head + "\n".join(lines))


def test_stacked_rename_and_cast(sales):
    script = script_for(sales, "RENAME SaleSummary::completedAt TO isCompleted",
                        "CAST ATTR SaleSummary::isCompleted TO Boolean")
    stacked = stack_optimize(DocumentGenerator().generate(sales, script))
    (bulk,) = stacked.statements
    assert bulk.ops == (0, 1)
    assert squash(bulk.text) == squash(STACKED_SALE_SUMMARY)


def test_reddit_adapt_statement(reddit, reddit_ops):
    generated = DocumentGenerator().generate(reddit, reddit_ops)
    assert len(generated.statements) == 15
    adapt = [s for s in generated.statements if s.ops == (5,)]
    assert [squash(s.text) for s in adapt] == [squash(ADAPT_ELEVEN_TO_FIVE)]
    assert adapt[0].comments == ("ADAPT ENTITY Comments::v11 TO v5",)


def test_reddit_delvars_remove(reddit, reddit_ops):
    generated = DocumentGenerator().generate(reddit, reddit_ops)
    assert all(".remove(" in s.text for s in generated.statements[:4])


def test_reddit_adapts_stack_into_one_bulk_write(reddit, reddit_ops):
    stacked = stack_optimize(DocumentGenerator().generate(reddit, reddit_ops))
    assert len(stacked.statements) == 5
    assert stacked.statements[-1].text.startswith("reddit.Comments.bulkWrite([\n")
    assert stacked.statements[-1].ops == tuple(range(4, 15))


SHOP_KEYWORDS = [
    ("ADD ENTITY Note: { +code: String, text: String }", ["createCollection(", "$addFields"],
     ["CREATE TABLE", "PRIMARY KEY (code)"],
     ["CREATE CONSTRAINT", "SET n += {"]),
    ("ADD ENTITY Tag: { }", ["createCollection(\"Tag\")"], ["CREATE TABLE tag (id uuid, PRIMARY KEY (id));"],
     ["no properties to fill"]),
    ("DELETE ENTITY Order", ["drop()"], ["DROP TABLE"], ["DETACH DELETE"]),
    ("RENAME ENTITY Order TO Purchase", ["renameCollection("], ["COPY", "DROP TABLE", "CREATE TABLE"],
     ["REMOVE n:Order", "SET n:Purchase"]),
    ("DELVAR ENTITY Customer::v1", ["remove("], None, ["MATCH", "DETACH DELETE"]),
    ("ADAPT ENTITY Customer::v1 TO v2", ["$unset", "$addFields"], None, ["REMOVE", "SET"]),
    ("UNION ENTITY Customer", ["$addFields"], None, ["coalesce("]),
    ("DELETE Order::total", ["$unset"], ["ALTER TABLE", "DROP"], ["REMOVE n.total"]),
    ("RENAME Order::total TO amount", ["$rename"], ["COPY", "DROP", "ADD"], ["SET n.amount", "REMOVE n.total"]),
    ("ADD ATTR Order::note: String", ["$addFields"], ["ALTER TABLE", "ADD"], ["SET n.note"]),
    ("CAST ATTR Order::total TO String", ["$set", "$convert", "to: 2"], ["COPY", "DROP TABLE", "CREATE TABLE"],
     ["toString("]),
    ("PROMOTE ATTR Order::customerId", None, ["COPY", "DROP TABLE", "CREATE TABLE"],
     ["CREATE CONSTRAINT", "IS UNIQUE"]),
    ("DEMOTE ATTR Order::id", None, ["COPY", "DROP TABLE", "CREATE TABLE"], ["DROP CONSTRAINT"]),
    ("COPY Customer::points TO Order::points WHERE id=customerId",
     ["$lookup", "$addFields", "$out"], ["COPY", "ADD"], ["MATCH", "SET b.points"]),
    ("MOVE Customer::points TO Order::points WHERE id=customerId",
     ["$lookup", "$out", "$unset"], ["COPY", "ADD", "DROP"], ["SET b.points", "REMOVE n.points"]),
]


@pytest.mark.parametrize("line, document, columnar, graph", SHOP_KEYWORDS)
def test_keywords_per_target(shop, line, document, columnar, graph):
    script = script_for(shop, line)
    for generator, expected in ((DocumentGenerator(), document), (ColumnarGenerator(), columnar),
                                (GraphGenerator(), graph)):
        generated = generator.generate(shop, script)
        text = "\n".join(s.text for s in generated.statements)
        if expected is None:
            assert not generated.statements and len(generated.unsupported) == 1
        else:
            assert not generated.unsupported, generated.unsupported
            for word in expected:
                assert word in text, (generator.backend, word)


def test_graph_bare_label_sets_nothing(shop):
    generated = GraphGenerator().generate(shop, script_for(shop, "ADD ENTITY Tag: { }"))
    assert [s.text for s in generated.statements] == ["// no properties to fill"]
    (create,) = DocumentGenerator().generate(shop, script_for(shop, "ADD ENTITY Tag: { }")).statements
    assert "$addFields" not in create.text


def test_columnar_cast_reloads_table(shop):
    generated = ColumnarGenerator().generate(shop, script_for(shop, "CAST ATTR Order::total TO Double"))
    words = [s.text.split()[0] for s in generated.statements]
    assert words == ["COPY", "CREATE", "DROP", "DROP", "CREATE", "COPY"]
    assert generated.statements[1].text.startswith("CREATE TABLE order_mig0 (")
    assert generated.statements[2].text == "DROP TABLE order_mig0;"
    assert "total double" in generated.statements[4].text
    assert "'./_mig/" in generated.statements[0].text


@pytest.mark.parametrize("line", [
    "RENAME ENTITY Order TO Purchase",
    "CAST ATTR Order::total TO String",
    "PROMOTE ATTR Order::customerId",
    "DEMOTE ATTR Order::id",
])
def test_columnar_reload_is_two_copy_drop_create_rounds(shop, line):
    generated = ColumnarGenerator().generate(shop, script_for(shop, line))
    words = sorted(s.text.split()[0] for s in generated.statements)
    assert words == ["COPY", "COPY", "CREATE", "CREATE", "DROP", "DROP"]
    assert generated.covered() == [0]


def test_columnar_delvar_only_script(reddit):
    generated = ColumnarGenerator().generate(reddit, script_for(reddit, "DELVAR ENTITY Comments::v1"))
    assert generated.statements == ()
    assert [u.op_index for u in generated.unsupported] == [0]
    assert generated.covered() == [0]


def test_columnar_rejects_scoped_selectors(shop):
    generated = ColumnarGenerator().generate(shop, script_for(shop, "RENAME Customer(v1)::phone TO tel"))
    assert generated.unsupported[0].reason == "tables have no structural variations"


def test_graph_renames_relationship(stackoverflow, stackoverflow_ops):
    generated = GraphGenerator().generate(stackoverflow, stackoverflow_ops)
    last = generated.statements[-1]
    assert "apoc.refactor.setType" in last.text and '"comments"' in last.text
    assert last.ops == (len(stackoverflow_ops) - 1,)
    assert generated.covered() == list(range(len(stackoverflow_ops)))


def test_graph_aggregates_unsupported(sales, sales_ops):
    generated = GraphGenerator().generate(sales, sales_ops)
    reasons = {u.op_index: u.reason for u in generated.unsupported}
    assert 3 in reasons and 4 in reasons
    assert generated.covered() == list(range(15))


def test_document_relationships_unsupported(stackoverflow):
    generated = DocumentGenerator().generate(stackoverflow, script_for(stackoverflow, "UNION RELATIONSHIP Rel_Comments"))
    assert generated.unsupported[0].reason == "document stores have no relationship types"


def test_generation_stops_on_precondition(shop):
    with pytest.raises(PreconditionViolation):
        DocumentGenerator().generate(shop, script_for(shop, "DELETE ENTITY Ghost"))


def test_document_collections_are_schema_qualified(shop):
    generated = DocumentGenerator().generate(shop, script_for(shop, "DELETE Order::total"))
    assert generated.statements[0].text.startswith("shop.Order.updateMany({}, ")


def test_single_statement_is_not_stacked(sales):
    generated = DocumentGenerator().generate(sales, script_for(sales, "DELETE Sale::isActive"))
    assert stack_optimize(generated) == generated


def test_pipelines_break_runs(shop):
    generated = DocumentGenerator().generate(shop, script_for(
        shop, "DELETE Order::total", "COPY Customer::points TO Order::points WHERE id=customerId",
        "ADD ATTR Order::note: String", "CAST ATTR Order::note TO Integer"))
    stacked = stack_optimize(generated)
    assert [s.ops for s in stacked.statements] == [(0,), (1,), (2, 3)]


def test_stacking_other_targets_fails(shop):
    generated = GraphGenerator().generate(shop, script_for(shop, "DELETE Order::total"))
    with pytest.raises(ValueError):
        stack_optimize(generated)


def _update(collection: str, n: int) -> Statement:
    return Statement(f"{collection}.updateMany({{}}, {{$unset: {{\"f{n}\": \"\"}}}})", (n,),
                     collection=collection, filter="{}", update=f"{{$unset: {{\"f{n}\": \"\"}}}}")


def _pipeline(collection: str, n: int) -> Statement:
    return Statement(f"{collection}.aggregate([])", (n,), collection=collection)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["db.A", "db.B"]), st.booleans()), max_size=12))
def test_stacking_preserves_statement_order(plan):
    statements = tuple((_update if stackable else _pipeline)(c, i) for i, (c, stackable) in enumerate(plan))
    script = GeneratedScript(Backend.DOCUMENT, statements)
    stacked = stack_optimize(script)
    assert flatten(stacked) == list(statements)
    assert [op for s in stacked.statements for op in s.ops] == list(range(len(plan)))
    for s in stacked.statements:
        if s.entries:
            assert len({e.collection for e in s.entries}) == 1 and len(s.entries) > 1


def test_registry():
    registry = default_registry()
    assert registry.names() == ["document", "columnar", "graph"]
    with pytest.raises(ConfigError):
        registry.get("relational")


def test_registry_skips_broken_entries():
    registry = GeneratorRegistry().load_from_config({"x": {"module": "schemahub.nowhere", "class": "X"}})
    assert registry.names() == []
