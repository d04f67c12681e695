import pytest
from fastapi.testclient import TestClient

from contextlab import __version__
from contextlab.main import app
from contextlab.models import behavior_to_json


@pytest.fixture
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy", "version": __version__}


def test_theories(client):
    assert set(client.get("/theories").json()) == {"ks", "cbd2", "strict"}


def test_decide_ks(client, prbox):
    response = client.post("/decide/ks", json=behavior_to_json(prbox))
    assert response.status_code == 200
    assert response.json()["verdict"] == "contextual"


def test_decide_ks_disturbing_is_422(client, disturbing1):
    response = client.post("/decide/ks", json=behavior_to_json(disturbing1))
    assert response.status_code == 422
    detail = response.json()["detail"]
    assert detail["error"] == "DisturbingBehaviorError"
    assert detail["witness"]["contexts"] == ["c12", "c23"]


def test_unknown_theory_is_404(client, prbox):
    assert client.post("/decide/nope", json=behavior_to_json(prbox)).status_code == 404


def test_validate_reports_problems(client, prbox):
    data = behavior_to_json(prbox)
    data["contexts"][0]["distribution"] = {"-1,-1": "1/2"}
    body = client.post("/validate", json=data).json()
    assert body["valid"] is False
    assert body["problems"] == ["context c12 sums to 1/2"]


def test_consistify_round_trip(client, maximally_disturbing):
    original = behavior_to_json(maximally_disturbing)
    consistified = client.post("/consistify", json=original)
    assert consistified.status_code == 200
    assert "provenance" in consistified.json()
    recovered = client.post("/deconsistify", json=consistified.json())
    assert recovered.status_code == 200
    assert recovered.json() == original


def test_deconsistify_without_provenance(client, prbox):
    response = client.post("/deconsistify", json=behavior_to_json(prbox))
    assert response.status_code == 422
    assert response.json()["detail"]["error"] == "FormatError"


def test_numlab(client):
    body = client.get("/numlab", params={"nmax": 20}).json()
    assert body["axioms"]["smallest_transported_counterexample"] == 9
    assert client.get("/numlab", params={"nmax": 1}).status_code == 422
