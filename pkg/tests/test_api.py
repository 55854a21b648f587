import pytest
from httpx import AsyncClient

from app import __version__
from app.main import app


@pytest.fixture
async def client():
    async with AsyncClient(app=app, base_url="http://test") as c:
        yield c


async def test_health(client):
    response = await client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "healthy"
    assert body["version"] == __version__


async def test_root_lists_endpoints(client):
    response = await client.get("/")
    assert response.status_code == 200
    assert response.json()["endpoints"]["simulate"] == "/api/v1/simulate"


async def test_presets(client):
    response = await client.get("/api/v1/presets")
    assert response.status_code == 200
    names = [p["name"] for p in response.json()]
    assert names == ["constant", "cosine_bump", "exp_sin", "two_mode", "wiener_small"]


async def test_simulate(client):
    response = await client.post(
        "/api/v1/simulate",
        json={"preset": "cosine_bump(0.5)", "n": 16, "t_end": 0.02, "record_every": 0.01},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["summary"]["termination"] == "ReachedTEnd"
    assert body["summary"]["records"] == 3
    assert body["records"][0]["min_u"] == pytest.approx(0.5)


async def test_simulate_reports_breakdown_in_summary(client):
    response = await client.post("/api/v1/simulate", json={"n": 16, "max_steps": 1})
    assert response.status_code == 200
    assert response.json()["summary"]["termination"] == "StepLimit"


async def test_simulate_validation_error(client):
    response = await client.post("/api/v1/simulate", json={"n": 6})
    assert response.status_code == 422
    body = response.json()
    assert body["error"] is True
    assert body["reason"] == "validation_error"


async def test_simulate_refuses_server_files(client):
    response = await client.post("/api/v1/simulate", json={"n": 16, "initial_data": "/etc/passwd"})
    assert response.status_code == 400
    assert "initial_data" in response.json()["message"]


async def test_fuzz(client):
    response = await client.post("/api/v1/fuzz", json={"trials": 3, "n": 64, "max_mode": 8})
    assert response.status_code == 200
    body = response.json()
    assert body["passed"] is True
    assert [row["index"] for row in body["rows"]] == [0, 1, 2]
    assert body["min_margin_1"] >= -1e-10
