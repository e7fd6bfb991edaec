"""Backend client behavior: config validation, prompt rendering, request
keys, cassette record/replay, retry policy, and response schema checks."""

import json

import httpx
import pytest

from prefnav.gateway.backends import (
    ROLES,
    BackendConfig,
    BackendError,
    BackendMode,
    Cassette,
    CassetteMiss,
    LlmClient,
    SchemaError,
    load_prompt_template,
    request_key,
    validate_context_response,
    validate_rule_update_response,
    validate_translation_response,
)

GOOD_TRANSLATION = {"effic": 0.1, "odist": 0.5, "hdist": 0.9, "velocity": 0.0}


def remote_config(**kwargs):
    base = dict(
        mode=BackendMode.REMOTE,
        endpoint="https://model.test/v1/infer",
        credential_env="PREFNAV_TEST_TOKEN",
        model="test-model",
    )
    base.update(kwargs)
    return BackendConfig(**base)


# --- configuration ----------------------------------------------------------


def test_deterministic_config_needs_nothing():
    cfg = BackendConfig()
    assert cfg.mode is BackendMode.DETERMINISTIC


@pytest.mark.parametrize("kwargs", [
    dict(mode=BackendMode.REMOTE),
    dict(mode=BackendMode.REMOTE, endpoint="https://x.test"),
    dict(mode=BackendMode.REMOTE, credential_env="TOK"),
    dict(mode=BackendMode.REMOTE, endpoint="https://x.test",
         credential_env="TOK", record=True),
    dict(mode=BackendMode.CASSETTE),
    dict(mode=BackendMode.CASSETTE, cassette_path="/nonexistent/tape.json"),
    dict(timeout_s=0.0),
    dict(max_retries=-1),
])
def test_invalid_configs_rejected(kwargs):
    with pytest.raises(ValueError):
        BackendConfig(**kwargs)


def test_cassette_config_accepts_existing_file(tmp_path):
    tape = tmp_path / "tape.json"
    tape.write_text("[]")
    cfg = BackendConfig(mode=BackendMode.CASSETTE, cassette_path=str(tape))
    assert cfg.cassette_path == str(tape)


def test_from_dict_parses_mode_and_rejects_unknown_keys(tmp_path):
    tape = tmp_path / "tape.json"
    tape.write_text("[]")
    cfg = BackendConfig.from_dict({"mode": "Cassette", "cassette_path": str(tape)})
    assert cfg.mode is BackendMode.CASSETTE

    with pytest.raises(ValueError, match="unknown key 'api_key'"):
        BackendConfig.from_dict({"api_key": "leaked"})
    with pytest.raises(ValueError, match="unknown mode"):
        BackendConfig.from_dict({"mode": "psychic"})


# --- prompt templates -------------------------------------------------------


def test_bundled_templates_load_for_every_role():
    for role in ROLES:
        template = load_prompt_template(role)
        assert template.role == role
        assert template.schema_version
        assert template.system.strip()
        assert template.user.strip()


def test_unknown_role_rejected():
    with pytest.raises(ValueError, match="unknown role"):
        load_prompt_template("fortune-telling")


def test_render_interpolates_payload_and_flags_missing_keys():
    template = load_prompt_template("context-prediction")
    prompt = template.render({"scene_description": "A sunlit kitchen."})
    assert "A sunlit kitchen." in prompt
    assert prompt.startswith(template.system)
    with pytest.raises(ValueError, match="missing payload key"):
        template.render({})


# --- request keys -----------------------------------------------------------


def test_request_key_is_stable_hex():
    key = request_key("translation", "prompt text", "translation-v1")
    assert key == request_key("translation", "prompt text", "translation-v1")
    assert len(key) == 64
    int(key, 16)


def test_request_key_separates_fields():
    # The separator prevents ("r", "ab", "c") and ("r", "a", "bc") from
    # hashing identically.
    assert request_key("r", "ab", "c") != request_key("r", "a", "bc")
    assert request_key("rule-update", "p", "v") != request_key("translation", "p", "v")


# --- cassette ---------------------------------------------------------------


def test_cassette_round_trip_and_stable_order(tmp_path):
    path = tmp_path / "tape.json"
    tape = Cassette.fresh(path)
    tape.record("bbb", {"role": "translation"}, {"effic": 0.5})
    tape.record("aaa", {"role": "translation"}, {"effic": 0.1})
    tape.save()

    data = json.loads(path.read_text())
    assert [e["key"] for e in data] == ["aaa", "bbb"]
    assert list(data[0]) == ["key", "request", "response", "recorded_at"]
    assert not path.with_name(path.name + ".tmp").exists()

    again = Cassette.load(path)
    assert again.lookup("aaa", "translation") == {"effic": 0.1}
    # A rewrite with unchanged entries is byte-identical.
    before = path.read_bytes()
    again.save()
    assert path.read_bytes() == before


def test_cassette_miss_names_key_and_role(tmp_path):
    path = tmp_path / "tape.json"
    path.write_text("[]")
    tape = Cassette.load(path)
    with pytest.raises(CassetteMiss) as exc:
        tape.lookup("deadbeef", "rule-update")
    assert exc.value.key == "deadbeef"
    assert exc.value.role == "rule-update"


@pytest.mark.parametrize("text", ['{"not": "a list"}', '[{"response": 1}]'])
def test_cassette_load_rejects_malformed_files(tmp_path, text):
    path = tmp_path / "tape.json"
    path.write_text(text)
    with pytest.raises(ValueError):
        Cassette.load(path)


# --- client transport behavior ----------------------------------------------


class Recorder:
    """Mock transport: serves scripted responses and logs every request."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.requests = []

    def handler(self, request: httpx.Request) -> httpx.Response:
        self.requests.append(request)
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        status, payload = item
        if isinstance(payload, str):
            return httpx.Response(status, text=payload)
        return httpx.Response(status, json=payload)

    def transport(self) -> httpx.MockTransport:
        return httpx.MockTransport(self.handler)


@pytest.fixture
def token(monkeypatch):
    monkeypatch.setenv("PREFNAV_TEST_TOKEN", "secret-value")


def make_client(recorder, sleeps=None, **cfg_kwargs):
    return LlmClient(
        remote_config(**cfg_kwargs),
        transport=recorder.transport(),
        sleep=(sleeps.append if sleeps is not None else (lambda s: None)),
    )


def test_deterministic_mode_has_no_client():
    with pytest.raises(ValueError, match="deterministic"):
        LlmClient(BackendConfig())


def test_successful_call_posts_prompt_with_bearer_auth(token):
    rec = Recorder([(200, GOOD_TRANSLATION)])
    with make_client(rec) as client:
        out = client.call("translation", {"rules": "[]", "context": "{}"})
    assert out == GOOD_TRANSLATION
    (request,) = rec.requests
    assert request.headers["authorization"] == "Bearer secret-value"
    body = json.loads(request.content)
    assert body["role"] == "translation"
    assert body["model"] == "test-model"
    assert "Stored preference rules" in body["prompt"]


def test_missing_credential_fails_without_network(token, monkeypatch):
    monkeypatch.delenv("PREFNAV_TEST_TOKEN")
    rec = Recorder([])
    with make_client(rec) as client:
        with pytest.raises(BackendError, match="PREFNAV_TEST_TOKEN"):
            client.call("translation", {"rules": "[]", "context": "{}"})
    assert rec.requests == []


def test_4xx_fails_immediately_without_retry(token):
    rec = Recorder([(403, {"error": "forbidden"})])
    sleeps = []
    with make_client(rec, sleeps) as client:
        with pytest.raises(BackendError, match="HTTP 403"):
            client.call("translation", {"rules": "[]", "context": "{}"})
    assert len(rec.requests) == 1
    assert sleeps == []


def test_5xx_retries_with_exponential_backoff(token):
    rec = Recorder([(500, "boom"), (503, "busy"), (200, GOOD_TRANSLATION)])
    sleeps = []
    with make_client(rec, sleeps) as client:
        out = client.call("translation", {"rules": "[]", "context": "{}"})
    assert out == GOOD_TRANSLATION
    assert len(rec.requests) == 3
    assert sleeps == [0.5, 1.0]


def test_retries_exhausted_raises_backend_error(token):
    rec = Recorder([(500, "a"), (500, "b"), (500, "c")])
    sleeps = []
    with make_client(rec, sleeps, max_retries=2) as client:
        with pytest.raises(BackendError, match="after 3 attempts"):
            client.call("translation", {"rules": "[]", "context": "{}"})
    assert len(rec.requests) == 3


def test_transport_errors_are_retried(token):
    rec = Recorder([
        httpx.ConnectError("connection refused"),
        (200, GOOD_TRANSLATION),
    ])
    with make_client(rec) as client:
        out = client.call("translation", {"rules": "[]", "context": "{}"})
    assert out == GOOD_TRANSLATION
    assert len(rec.requests) == 2


def test_non_json_success_is_a_schema_error(token):
    rec = Recorder([(200, "<html>login page</html>")])
    with make_client(rec, max_retries=0) as client:
        with pytest.raises(SchemaError, match="not JSON"):
            client.call("translation", {"rules": "[]", "context": "{}"})


def test_record_then_replay_via_cassette(token, tmp_path):
    tape = tmp_path / "tape.json"
    payload = {"rules": "[]", "context": "{}"}

    rec = Recorder([(200, GOOD_TRANSLATION)])
    with make_client(rec, cassette_path=str(tape), record=True) as client:
        client.call("translation", payload)
    assert tape.is_file()

    replay_cfg = BackendConfig(mode=BackendMode.CASSETTE, cassette_path=str(tape))
    with LlmClient(replay_cfg) as replay:
        assert replay.call("translation", payload) == GOOD_TRANSLATION
        with pytest.raises(CassetteMiss):
            replay.call("translation", {"rules": "[]", "context": '{"other": 1}'})


def test_cassette_mode_never_touches_network(token, tmp_path):
    tape = tmp_path / "tape.json"
    rec = Recorder([(200, GOOD_TRANSLATION)])
    with make_client(rec, cassette_path=str(tape), record=True) as client:
        client.call("translation", {"rules": "[]", "context": "{}"})

    replay_cfg = BackendConfig(mode=BackendMode.CASSETTE, cassette_path=str(tape))
    with LlmClient(replay_cfg, transport=None) as replay:
        assert replay._client is None
        assert replay.call("translation", {"rules": "[]", "context": "{}"})


# --- response schema validation ----------------------------------------------


def test_context_schema_error_names_first_violating_key():
    raw = {"lighting": "Bright", "objects": [], "human_present": False,
           "scene_description": "x"}
    with pytest.raises(SchemaError) as exc:
        validate_context_response(raw)
    assert exc.value.key == "room_type"
    assert exc.value.payload is raw


def test_rule_update_schema_error_names_first_violating_key():
    raw = {"effects": [{"objective": "speediness", "level": "high"}]}
    with pytest.raises(SchemaError) as exc:
        validate_rule_update_response(raw)
    assert exc.value.key == "effects[0].objective"
    assert exc.value.payload is raw

    with pytest.raises(SchemaError) as exc:
        validate_rule_update_response({"effects": [], "condition": {"mood": "dim"}})
    assert exc.value.key == "condition.mood"


def test_translation_schema_error_names_first_violating_key():
    raw = {"effic": 1.5, "odist": 0.5, "hdist": 0.5, "velocity": 0.5}
    with pytest.raises(SchemaError) as exc:
        validate_translation_response(raw)
    assert exc.value.key == "effic"
    assert exc.value.payload is raw

    with pytest.raises(SchemaError) as exc:
        validate_translation_response({"effic": 0.5, "odist": 0.5, "hdist": 0.5})
    assert exc.value.key == "velocity"


def test_empty_effects_list_is_schema_valid():
    raw = {"effects": [], "condition": {}}
    assert validate_rule_update_response(raw) is raw


def test_schema_error_from_remote_response(token):
    bad = {"effic": 0.5, "odist": 0.5, "hdist": 0.5, "velocity": "fast"}
    rec = Recorder([(200, bad)])
    with make_client(rec) as client:
        with pytest.raises(SchemaError) as exc:
            client.call("translation", {"rules": "[]", "context": "{}"})
    assert exc.value.key == "velocity"
    assert exc.value.payload == bad
