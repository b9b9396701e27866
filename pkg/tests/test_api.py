import pytest
from fastapi.testclient import TestClient

from schemahub.main import app

from conftest import FIXTURES, SHOP


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def orion(*lines):
    return "T operations\nUsing shop:1\n" + "\n".join(lines) + "\n"


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_ready_lists_targets(client):
    body = client.get("/ready").json()
    assert body == {"ready": True, "targets": ["document", "columnar", "graph"]}


def test_validate(client):
    r = client.post("/schemas/validate", json={"athena": SHOP})
    assert r.status_code == 200
    assert r.json() == {"violations": []}


def test_validate_reports_dangling_reference(client):
    text = "Schema d:1\n\nRoot entity A {\n  +id: String,\n  b: Ref<B>&\n}\n"
    r = client.post("/schemas/validate", json={"athena": text})
    assert r.status_code == 200
    assert r.json()["violations"]


def test_validate_parse_error(client):
    r = client.post("/schemas/validate", json={"athena": "Schema shop:1\nRoot entity {"})
    assert r.status_code == 422
    assert r.json()["line"] == 2


def test_features(client):
    r = client.post("/schemas/features", json={"athena": SHOP, "type": "Customer"})
    assert r.status_code == 200
    assert r.json()["features"] == ["id", "name", "points", "phone", "email", "vip"]


def test_features_unknown_type(client):
    r = client.post("/schemas/features", json={"athena": SHOP, "type": "Ghost"})
    assert r.status_code == 404


def test_apply(client):
    r = client.post("/scripts/apply", json={"athena": SHOP, "orion": orion("RENAME ENTITY Order TO Purchase")})
    assert r.status_code == 200
    body = r.json()
    assert "Root entity Purchase" in body["schema"]
    assert "Schema shop:2" in body["schema"]
    assert body["log"] == [{"index": 0, "op": "RENAME ENTITY Order TO Purchase"}]


def test_apply_failed_precondition(client):
    r = client.post("/scripts/apply", json={"athena": SHOP, "orion": orion("DELETE ENTITY Ghost")})
    assert r.status_code == 409
    assert r.json()["op_index"] == 0


def test_apply_invalid_schema(client):
    text = "Schema d:1\n\nRoot entity A {\n  +id: String,\n  b: Ref<B>&\n}\n"
    r = client.post("/scripts/apply", json={"athena": text, "orion": orion()})
    assert r.status_code == 422


def test_generate(client):
    sales = (FIXTURES / "sales.athena").read_text()
    script = ("S operations\nUsing Sales_department:1\n"
              "RENAME SaleSummary::completedAt TO isCompleted\n"
              "CAST ATTR SaleSummary::isCompleted TO Boolean\n")
    r = client.post("/scripts/generate", json={"athena": sales, "orion": script})
    assert r.status_code == 200
    body = r.json()
    assert len(body["statements"]) == 1
    assert body["statements"][0]["ops"] == [0, 1]
    assert body["provenance"] == [[0, 0], [1, 0]]
    assert body["unsupported"] == []


def test_generate_reports_unsupported(client):
    r = client.post("/scripts/generate", json={"athena": SHOP, "orion": orion("DELVAR ENTITY Customer::v1"),
                                               "target": "columnar"})
    assert r.status_code == 200
    assert r.json()["unsupported"][0]["op_index"] == 0


def test_generate_unknown_target(client):
    r = client.post("/scripts/generate", json={"athena": SHOP, "orion": orion(), "target": "relational"})
    assert r.status_code == 404


def test_check(client):
    r = client.post("/scripts/check", json={"kind": "rename_type", "cases": 5, "seed": 3})
    assert r.status_code == 200
    body = r.json()
    assert body["kind"] == "rename_type" and body["cases"] == 5
    assert body["failures"] == []


def test_check_rejects_zero_cases(client):
    r = client.post("/scripts/check", json={"kind": "rename_type", "cases": 0})
    assert r.status_code == 422
