"""Gateway HTTP/websocket surface, exercised with the test client against a
runtime that is stepped manually (no background threads)."""

import pytest

fastapi = pytest.importorskip("fastapi")
from fastapi.testclient import TestClient

from prefnav.gateway.adapters import RoleBindings
from prefnav.gateway.app import create_app
from prefnav.gateway.backends import BackendConfig
from prefnav.gateway.runtime import PipelineRuntime, Trigger
from prefnav.morl.policy import LinearQPolicy


@pytest.fixture
def runtime(tmp_path):
    return PipelineRuntime(
        "office",
        LinearQPolicy(),
        RoleBindings(BackendConfig()),
        rules_path=tmp_path / "rules.json",
    )


@pytest.fixture
def client(runtime):
    return TestClient(create_app(runtime))


def test_state_reports_scenario_and_robot(client):
    data = client.get("/state").json()
    assert data["scenario"] == "office"
    assert data["episode"] == 1
    assert data["outcome"] is None
    assert set(data["robot"]) == {"x", "y", "theta", "v"}
    assert data["generation"] == 0


def test_health_reports_backends_and_counters(client):
    data = client.get("/health").json()
    assert data["status"] == "ok"
    assert data["backend_modes"] == {
        "context-prediction": "deterministic",
        "rule-update": "deterministic",
        "translation": "deterministic",
    }
    assert data["failure_counters"] == {
        "context-prediction": 0, "rule-update": 0, "translation": 0,
    }
    assert data["ticks"] == 0
    assert data["uptime_s"] >= 0


def test_preference_defaults_to_neutral(client):
    data = client.get("/preference").json()
    assert data["lambda"] == {"effic": 0.5, "odist": 0.5, "hdist": 0.5,
                              "velocity": 0.5}
    assert data["applied_rules"] == []
    assert data["generation"] == 0
    assert data["rules_version"]


def test_feedback_creates_rule_and_updates_preference(client, runtime):
    response = client.post("/feedback", json={"text": "keep far away from people"})
    assert response.status_code == 200
    body = response.json()
    assert body["operation"] == "add"
    assert body["rule"]["effects"] == [{"objective": "hdist", "level": "high"}]
    assert body["lambda"]["hdist"] == pytest.approx(0.9)
    assert body["rule"]["id"] in body["applied_rules"]

    rules = client.get("/rules").json()
    assert len(rules["rules"]) == 1
    assert rules["rules"][0]["id"] == body["rule"]["id"]

    # /preference reflects the new rules once the queued reasoning cycle runs.
    runtime.reasoning_cycle(runtime._triggers.get_nowait())
    pref = client.get("/preference").json()
    assert pref["lambda"]["hdist"] == pytest.approx(0.9)
    assert pref["generation"] == 1


def test_feedback_error_mapping(client):
    conflict = client.post("/feedback", json={"text": "ignore collisions"})
    assert conflict.status_code == 409

    unparseable = client.post("/feedback", json={"text": "do a barrel roll"})
    assert unparseable.status_code == 422

    empty = client.post("/feedback", json={"text": "   "})
    assert empty.status_code == 422

    missing_field = client.post("/feedback", json={})
    assert missing_field.status_code == 422


def test_feedback_backend_failure_maps_to_502(client, runtime):
    def broken(store, text, context):
        from prefnav.gateway.backends import BackendError
        raise BackendError("model unreachable")

    runtime.bindings.update_rules = broken
    response = client.post("/feedback", json={"text": "move slowly"})
    assert response.status_code == 502
    assert "BackendError" in response.json()["detail"]


def test_delete_rule_endpoint(client):
    body = client.post("/feedback", json={"text": "move slowly"}).json()
    rule_id = body["rule"]["id"]

    gone = client.delete(f"/rules/{rule_id}")
    assert gone.status_code == 200
    assert gone.json()["deleted"]["id"] == rule_id
    assert client.get("/rules").json()["rules"] == []

    missing = client.delete(f"/rules/{rule_id}")
    assert missing.status_code == 404


def test_scenario_reset_endpoint(client):
    data = client.post("/scenario/home/reset")
    assert data.status_code == 200
    assert data.json()["scenario"] == "home"
    assert data.json()["episode"] == 1

    missing = client.post("/scenario/atlantis/reset")
    assert missing.status_code == 404


def test_stream_frames_match_contract(client, runtime):
    for _ in range(3):
        runtime.tick()
    with client.websocket_connect("/stream") as ws:
        frame = ws.receive_json()
    assert set(frame) == {"t", "robot", "humans", "goal", "lambda",
                          "generation", "outcome"}
    assert frame["t"] == pytest.approx(0.3)
    assert frame["generation"] == 0
    assert frame["outcome"] is None
    assert set(frame["lambda"]) == {"effic", "odist", "hdist", "velocity"}
    assert isinstance(frame["humans"], list) and frame["humans"]


def test_stream_reflects_reasoning_generation(client, runtime):
    client.post("/feedback", json={"text": "keep far away from people"})
    runtime.reasoning_cycle(Trigger.RULES_CHANGED)
    runtime.tick()
    with client.websocket_connect("/stream") as ws:
        frame = ws.receive_json()
    assert frame["generation"] == 1
    assert frame["lambda"]["hdist"] == pytest.approx(0.9)


def test_static_ui_served_when_present(tmp_path, runtime):
    ui = tmp_path / "dist"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><title>nav</title>")
    client = TestClient(create_app(runtime, static_dir=ui))

    page = client.get("/")
    assert page.status_code == 200
    assert "nav" in page.text
    # API routes still win over the static mount.
    assert client.get("/health").json()["status"] == "ok"


def test_no_static_dir_root_is_404(client):
    assert client.get("/").status_code == 404
