from schemahub.codegen.base import Backend, GeneratedScript, Statement, UnsupportedOp
from schemahub.codegen.columnar import ColumnarGenerator
from schemahub.codegen.document import DocumentGenerator
from schemahub.codegen.stacking import stack_optimize
from schemahub.codegen.writer import provenance_lines, render_script, write_script
from schemahub.frontends.orion import parse_orion


def mixed_script() -> GeneratedScript:
    return GeneratedScript(
        Backend.COLUMNAR,
        statements=(
            Statement("ALTER TABLE a DROP x;", (1,), ("DELETE A::x",)),
            Statement("COPY a (id) TO 'f.csv';", (3,), ("RENAME A::y TO z",)),
            Statement("ALTER TABLE a DROP y;", (3,)),
        ),
        unsupported=(UnsupportedOp(0, "DELVAR ENTITY A::v1", "no variations"),
                     UnsupportedOp(2, "UNION ENTITY A", "no variations")),
        name="demo",
        using=("s", 4),
    )


def test_header_and_markers():
    text = render_script(mixed_script(), "--")
    lines = text.splitlines()
    assert lines[:3] == ["-- Script: demo", "-- Using: s:4", "-- Target: columnar"]
    assert lines.index("-- UNSUPPORTED [0] DELVAR ENTITY A::v1 (no variations)") < lines.index("-- DELETE A::x")
    assert lines.index("-- UNSUPPORTED [2] UNION ENTITY A (no variations)") < lines.index("-- RENAME A::y TO z")
    assert text.endswith("ALTER TABLE a DROP y;\n")


def test_provenance_lines():
    assert provenance_lines(mixed_script()) == ["0\t-", "1\t0", "2\t-", "3\t1", "3\t2"]


def test_empty_script_renders_header_only():
    text = render_script(GeneratedScript(Backend.GRAPH, name="e", using=("s", 1)))
    assert text == "// Script: e\n// Using: s:1\n// Target: graph\n\n"


def test_write_document_script(tmp_path, sales):
    script = parse_orion("Sales_ops operations\nUsing Sales_department:1\n"
                         "RENAME SaleSummary::completedAt TO isCompleted\n"
                         "CAST ATTR SaleSummary::isCompleted TO Boolean\n"
                         "DELETE Sale::isActive\n")
    generator = DocumentGenerator()
    generated = stack_optimize(generator.generate(sales, script))
    text_path, map_path = write_script(generated, generator, tmp_path / "out")
    assert text_path.name == "Sales_ops.document.js"
    assert map_path.name == "Sales_ops.document.map"
    assert "bulkWrite" in text_path.read_text()
    assert map_path.read_text().splitlines() == ["0\t0", "1\t0", "2\t1"]


def test_write_columnar_script(tmp_path, reddit):
    script = parse_orion("R operations\nUsing reddit:1\nDELVAR ENTITY Comments::v1\nDELETE Comments::ups\n")
    generator = ColumnarGenerator(mig_dir="/tmp/mig")
    generated = generator.generate(reddit, script)
    text_path, map_path = write_script(generated, generator, tmp_path)
    assert text_path.name == "R.columnar.cql"
    assert map_path.read_text() == "0\t-\n1\t0\n"
    assert "-- UNSUPPORTED [0]" in text_path.read_text()


def test_targets_sharing_a_directory_keep_their_maps(tmp_path, reddit):
    script = parse_orion("R operations\nUsing reddit:1\nDELVAR ENTITY Comments::v1\nDELETE Comments::ups\n")
    for generator in (DocumentGenerator(), ColumnarGenerator(mig_dir="/tmp/mig")):
        write_script(generator.generate(reddit, script), generator, tmp_path)
    assert sorted(p.name for p in tmp_path.glob("*.map")) == ["R.columnar.map", "R.document.map"]
    assert (tmp_path / "R.columnar.map").read_text() == "0\t-\n1\t0\n"
    assert (tmp_path / "R.document.map").read_text().splitlines()[0] == "0\t0"
