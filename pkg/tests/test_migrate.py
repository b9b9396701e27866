import pytest
from oracle import make_rows, replay

from schemahub.core.errors import CastError, PreconditionViolation, UnknownType
from schemahub.data.classify import NO_MATCH, census, declared_counts
from schemahub.data.database import Database, Dataset, StoreMode, canonical_bytes
from schemahub.data.migrate import migrate
from schemahub.data.values import Mode, Record
from schemahub.engine.evolution import apply_script
from schemahub.frontends.athena import parse_athena
from schemahub.frontends.orion import parse_orion


def script_for(schema, *lines):
    head = f"T operations\nUsing {schema.name}:{schema.version}\n"
    return parse_orion(head + "\n".join(lines))


def shop_db(shop, seed=0):
    rows = {
        "Customer": make_rows(shop, "Customer", {1: 6, 2: 4}, seed),
        "Order": make_rows(shop, "Order", {1: 5}, seed),
    }
    db = Database(StoreMode.AGGREGATE, {name: Dataset(name, [Record(r) for r in rs]) for name, rs in rows.items()})
    return db, rows


def as_rows(db):
    return {name: [dict(r) for r in ds.records] for name, ds in db.collections.items()}


@pytest.mark.parametrize("lines", [
    ["RENAME Customer::name TO fullName"],
    ["RENAME Customer(v2)::email TO mail"],
    ["CAST ATTR Customer::points TO Double", "CAST ATTR Order::total TO String"],
    ["ADD ATTR *::note: String"],
    ["UNION ENTITY Customer", "DELETE Customer::phone"],
    ["RENAME ENTITY Order TO Purchase", "DELETE ENTITY Customer"],
    ["ADAPT ENTITY Customer::v1 TO v2", "CAST ATTR Customer(v2)::vip TO String"],
    ["DELVAR ENTITY Customer::v2", "DEMOTE ATTR Order::id"],
])
def test_matches_oracle_on_shop(shop, lines):
    db, rows = shop_db(shop)
    script = script_for(shop, *lines)
    migrated, report = migrate(db, shop, script)
    assert as_rows(migrated) == replay(rows, shop, script)
    assert len(report.ops) == len(lines)


def test_input_database_is_untouched(shop):
    db, _ = shop_db(shop)
    before = canonical_bytes(db)
    migrate(db, shop, script_for(shop, "DELETE Customer::name"))
    assert canonical_bytes(db) == before


def test_report_counts(shop):
    db, _ = shop_db(shop)
    _, report = migrate(db, shop, script_for(shop, "RENAME Customer(v1)::phone TO tel", "DELVAR ENTITY Customer::v1"))
    assert report.lines() == [
        "0\tRENAME Customer(v1)::phone TO tel\t6\t0\t0\t0",
        "1\tDELVAR ENTITY Customer::v1\t0\t0\t6\t0",
    ]


@pytest.fixture
def reddit_db(reddit):
    counts = declared_counts(reddit.get_type("Comments"))
    rows = {"Comments": make_rows(reddit, "Comments", counts, seed=3)}
    return Database(StoreMode.AGGREGATE, {"Comments": Dataset("Comments", [Record(r) for r in rows["Comments"]])}), rows


def test_reddit_cleanup(reddit, reddit_ops, reddit_db):
    db, rows = reddit_db
    migrated, report = migrate(db, reddit, reddit_ops)
    assert sum(r.deleted for r in report.ops) == 10
    assert [r.deleted for r in report.ops[:4]] == [3, 2, 1, 4]
    evolved = apply_script(reddit, reddit_ops).schema
    counts = census(migrated, evolved)["Comments"]
    assert NO_MATCH not in counts
    assert len(counts) <= 5
    assert len(migrated.dataset("Comments")) == len(db.dataset("Comments")) - 10


def test_reddit_matches_oracle(reddit, reddit_ops, reddit_db):
    db, rows = reddit_db
    migrated, _ = migrate(db, reddit, reddit_ops)
    assert as_rows(migrated) == replay(rows, reddit, reddit_ops)


def test_strict_cast_names_the_record(shop):
    db, _ = shop_db(shop)
    with pytest.raises(CastError) as info:
        migrate(db, shop, script_for(shop, "CAST ATTR Customer::name TO Integer"))
    assert info.value.record == ("Customer", 0)
    assert info.value.op_index == 0


def test_lenient_cast_warns(shop):
    db, _ = shop_db(shop)
    migrated, report = migrate(db, shop, script_for(shop, "CAST ATTR Customer::name TO Integer"), Mode.LENIENT)
    assert report.warnings == 10
    assert all(r["name"] == 0 for r in migrated.dataset("Customer"))


def test_schema_violation_aborts_before_data(shop):
    db, _ = shop_db(shop)
    with pytest.raises(PreconditionViolation):
        migrate(db, shop, script_for(shop, "DELETE Customer::name", "DELETE ENTITY Ghost"))


def test_unknown_dataset(shop):
    db, _ = shop_db(shop)
    db.collections["Stray"] = Dataset("Stray")
    with pytest.raises(UnknownType):
        migrate(db, shop, script_for(shop, "DELETE Customer::name"))


def test_copy_with_join(shop):
    db, _ = shop_db(shop)
    for i, order in enumerate(db.dataset("Order")):
        order["customerId"] = db.dataset("Customer").records[i]["id"]
    migrated, _ = migrate(db, shop, script_for(shop, "COPY Customer::points TO Order::points WHERE id=customerId"))
    for i, order in enumerate(migrated.dataset("Order")):
        assert order["points"] == db.dataset("Customer").records[i]["points"]


CLUB = """
Schema club:1

Root entity Member {
  +id:       String,
  email:     String,
  ? profile: Aggr<Profile>&
}

Entity Profile {
  city: String
}
"""


def test_nest_into_missing_aggregate_keeps_the_value():
    club = parse_athena(CLUB, "club.athena")
    members = [
        Record({"id": "m1", "email": "a@b.com", "profile": None}),
        Record({"id": "m2", "email": "c@d.com"}),
        Record({"id": "m3", "email": "e@f.com", "profile": {"city": "Oslo"}}),
    ]
    db = Database(StoreMode.AGGREGATE, {"Member": Dataset("Member", members)})
    migrated, report = migrate(db, club, script_for(club, "NEST Member::email TO profile"))
    assert [dict(r) for r in migrated.dataset("Member")] == [
        {"id": "m1", "profile": {"city": "", "email": "a@b.com"}},
        {"id": "m2", "profile": {"city": "", "email": "c@d.com"}},
        {"id": "m3", "profile": {"city": "Oslo", "email": "e@f.com"}},
    ]
    assert report.lines() == ["0\tNEST Member::email TO profile\t3\t2\t0\t0"]
