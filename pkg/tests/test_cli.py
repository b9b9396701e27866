import pytest
from click.testing import CliRunner

from schemahub.cli import cli
from schemahub.data.database import load_database

from conftest import SHOP


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def shop_files(tmp_path):
    schema = tmp_path / "shop.athena"
    schema.write_text(SHOP)
    ops = tmp_path / "rename.orion"
    ops.write_text("Rename operations\nUsing shop:1\nRENAME Customer::name TO fullName\n")
    db = tmp_path / "db"
    db.mkdir()
    (db / "manifest.yaml").write_text("mode: aggregate\ntypes: [Customer, Order]\n")
    (db / "Customer.ndjson").write_text(
        '{"id": "c1", "name": "Ann", "points": 3, "phone": "555"}\n'
        '{"id": "c2", "name": "Bob", "points": 1, "email": "b@x.com", "vip": true}\n')
    (db / "Order.ndjson").write_text('{"id": "o1", "customerId": "c1", "total": 12}\n')
    return schema, ops, db


def test_check_accepts_well_formed_schema(runner, fixtures):
    result = runner.invoke(cli, ["check", "--schema", str(fixtures / "sales.athena")])
    assert result.exit_code == 0, result.output


def test_check_reports_violations(runner, tmp_path):
    schema = tmp_path / "dangling.athena"
    schema.write_text("Schema d:1\n\nRoot entity A {\n  +id: String,\n  b: Ref<B>&\n}\n")
    result = runner.invoke(cli, ["check", "--schema", str(schema)])
    assert result.exit_code == 1
    assert result.output.strip()


def test_check_rejects_unparsable_schema(runner, tmp_path):
    schema = tmp_path / "empty.athena"
    schema.write_text("")
    result = runner.invoke(cli, ["check", "--schema", str(schema)])
    assert result.exit_code == 2


def test_evolve_writes_schema(runner, fixtures, tmp_path):
    out = tmp_path / "out" / "sales2.athena"
    result = runner.invoke(cli, ["evolve", "--schema", str(fixtures / "sales.athena"),
                                 "--orion", str(fixtures / "sales_ops.orion"), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "Root entity Employee" in out.read_text()
    assert any(line.startswith("14\t") for line in result.output.splitlines())


def test_evolve_stops_on_failed_precondition(runner, shop_files, tmp_path):
    schema, _, _ = shop_files
    ops = tmp_path / "bad.orion"
    ops.write_text("Bad operations\nUsing shop:1\nDELETE ENTITY Ghost\n")
    result = runner.invoke(cli, ["evolve", "--schema", str(schema), "--orion", str(ops),
                                 "--out", str(tmp_path / "x.athena")])
    assert result.exit_code == 1
    assert not (tmp_path / "x.athena").exists()


def test_codegen_document(runner, fixtures, tmp_path):
    out = tmp_path / "gen"
    result = runner.invoke(cli, ["codegen", "--schema", str(fixtures / "sales.athena"),
                                 "--orion", str(fixtures / "sales_ops.orion"),
                                 "--target", "document", "--out", str(out)])
    assert result.exit_code == 0, result.output
    (script,) = out.glob("*.js")
    (mapping,) = out.glob("*.map")
    assert "bulkWrite" in script.read_text()
    assert mapping.read_text().splitlines()[0].startswith("0\t")


def test_codegen_unknown_target(runner, fixtures, tmp_path):
    result = runner.invoke(cli, ["codegen", "--schema", str(fixtures / "sales.athena"),
                                 "--orion", str(fixtures / "sales_ops.orion"),
                                 "--target", "relational", "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_migrate(runner, shop_files, tmp_path):
    schema, ops, db = shop_files
    out = tmp_path / "migrated"
    result = runner.invoke(cli, ["migrate", "--schema", str(schema), "--orion", str(ops),
                                 "--db", str(db), "--out", str(out)])
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert "before\tCustomer\t1\t1" in lines
    assert "after\tCustomer\t2\t1" in lines
    assert (out / "migration.report").read_text() == "0\tRENAME Customer::name TO fullName\t2\t0\t0\t0\n"
    migrated = load_database(out)
    assert [r["fullName"] for r in migrated.collections["Customer"].records] == ["Ann", "Bob"]


def test_propcheck_quick_run(runner):
    result = runner.invoke(cli, ["propcheck", "--cases", "1", "--no-sweep"])
    assert result.exit_code == 0, result.output
    assert any(line.startswith("add_type\t1\t") for line in result.output.splitlines())


def test_propcheck_rejects_zero_cases(runner):
    result = runner.invoke(cli, ["propcheck", "--cases", "0"])
    assert result.exit_code == 2


def test_bad_config_exits_with_input_error(runner, tmp_path, fixtures):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("propcheck:\n  cases: -1\n")
    result = runner.invoke(cli, ["--config", str(cfg), "codegen", "--schema", str(fixtures / "sales.athena"),
                                 "--orion", str(fixtures / "sales_ops.orion"),
                                 "--target", "document", "--out", str(tmp_path / "o")])
    assert result.exit_code == 2
