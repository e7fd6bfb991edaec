"""Remote model adapters: prompt templates, transport with retries, cassette
record/replay, and per-role response schema validation.

Three reasoning roles exist (context-prediction, rule-update, translation);
each ships a versioned prompt template as package data.  Requests are keyed
by a content hash of (role, rendered prompt, schema version) so a cassette
survives template edits only when the rendered text is unchanged.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import httpx

from ..context import ContextSchemaError, SceneContext, context_from_dict

ROLES = ("context-prediction", "rule-update", "translation")

_LEVELS = ("low", "medium", "high")
_OBJECTIVES = ("effic", "odist", "hdist", "velocity")
_CONDITION_KEYS = {"room_type", "lighting", "human_present", "required_objects"}


class BackendError(RuntimeError):
    """Remote call failed after exhausting retries (or was rejected)."""


class CassetteMiss(KeyError):
    """Cassette playback had no entry for the request key."""

    def __init__(self, key: str, role: str):
        self.key = key
        self.role = role
        super().__init__(f"no cassette entry for {role} request {key}")


class SchemaError(ValueError):
    """Model response violates the role schema.  ``key`` names the first
    offending field; ``payload`` preserves the raw response."""

    def __init__(self, key: str, message: str, payload: Any):
        self.key = key
        self.payload = payload
        super().__init__(f"{key}: {message}")


class BackendMode(Enum):
    DETERMINISTIC = "deterministic"
    REMOTE = "remote"
    CASSETTE = "cassette"


@dataclass(frozen=True)
class BackendConfig:
    """One reasoning backend.  ``credential_env`` is the NAME of the
    environment variable holding the API credential; the value itself never
    appears in configuration."""

    mode: BackendMode = BackendMode.DETERMINISTIC
    endpoint: str | None = None
    credential_env: str | None = None
    model: str | None = None
    timeout_s: float = 30.0
    max_retries: int = 2
    cassette_path: str | None = None
    record: bool = False

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.mode is BackendMode.REMOTE:
            if not self.endpoint:
                raise ValueError("remote backend requires an endpoint")
            if not self.credential_env:
                raise ValueError("remote backend requires a credential env-var name")
            if self.record and not self.cassette_path:
                raise ValueError("recording requires a cassette path")
        elif self.mode is BackendMode.CASSETTE:
            if not self.cassette_path:
                raise ValueError("cassette backend requires a cassette path")
            if not Path(self.cassette_path).is_file():
                raise ValueError(f"cassette file not found: {self.cassette_path}")

    @classmethod
    def from_dict(cls, data: dict) -> "BackendConfig":
        if not isinstance(data, dict):
            raise ValueError("backend config: expected an object")
        known = {
            "mode", "endpoint", "credential_env", "model",
            "timeout_s", "max_retries", "cassette_path", "record",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"backend config: unknown key {sorted(unknown)[0]!r}")
        kwargs = dict(data)
        if "mode" in kwargs:
            try:
                kwargs["mode"] = BackendMode(str(kwargs["mode"]).lower())
            except ValueError:
                raise ValueError(f"backend config: unknown mode {data['mode']!r}") from None
        return cls(**kwargs)


# --- prompt templates -------------------------------------------------------


@dataclass(frozen=True)
class PromptTemplate:
    role: str
    version: int
    schema_version: str
    system: str
    user: str

    def render(self, payload: dict) -> str:
        try:
            user = self.user.format(**payload)
        except KeyError as exc:
            raise ValueError(f"prompt for {self.role} missing payload key {exc}") from None
        return f"{self.system}\n\n{user}"


def load_prompt_template(role: str) -> PromptTemplate:
    if role not in ROLES:
        raise ValueError(f"unknown role {role!r}; expected one of {ROLES}")
    ref = resources.files("prefnav.data.prompts").joinpath(f"{role}.json")
    data = json.loads(ref.read_text(encoding="utf-8"))
    return PromptTemplate(
        role=data["role"],
        version=int(data["version"]),
        schema_version=str(data["schema_version"]),
        system=str(data["system"]),
        user=str(data["user"]),
    )


# --- response schemas -------------------------------------------------------


def _require_type(payload: dict, key: str, kind: type | tuple, raw: Any) -> Any:
    if key not in payload:
        raise SchemaError(key, "missing required key", raw)
    value = payload[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(key, f"expected a number, got {type(value).__name__}", raw)
        return float(value)
    if not isinstance(value, kind):
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise SchemaError(key, f"expected {name}, got {type(value).__name__}", raw)
    return value


def validate_context_response(raw: Any) -> SceneContext:
    try:
        return context_from_dict(raw)
    except ContextSchemaError as exc:
        raise SchemaError(exc.key, str(exc), raw) from exc
    except (TypeError, ValueError) as exc:
        raise SchemaError("", str(exc), raw) from exc


def validate_rule_update_response(raw: Any) -> dict:
    if not isinstance(raw, dict):
        raise SchemaError("", f"expected an object, got {type(raw).__name__}", raw)
    # An empty effects list is schema-valid: it is the model's way of
    # declining feedback that would relax a baseline objective.
    effects = _require_type(raw, "effects", list, raw)
    for i, effect in enumerate(effects):
        where = f"effects[{i}]"
        if not isinstance(effect, dict):
            raise SchemaError(where, "expected an object", raw)
        objective = effect.get("objective")
        if objective not in _OBJECTIVES:
            raise SchemaError(f"{where}.objective", f"expected one of {_OBJECTIVES}", raw)
        level = effect.get("level")
        if level not in _LEVELS:
            raise SchemaError(f"{where}.level", f"expected one of {_LEVELS}", raw)
    condition = raw.get("condition", {})
    if not isinstance(condition, dict):
        raise SchemaError("condition", "expected an object", raw)
    unknown = set(condition) - _CONDITION_KEYS
    if unknown:
        raise SchemaError(f"condition.{sorted(unknown)[0]}", "unknown condition key", raw)
    return raw


def validate_translation_response(raw: Any) -> dict:
    if not isinstance(raw, dict):
        raise SchemaError("", f"expected an object, got {type(raw).__name__}", raw)
    for name in _OBJECTIVES:
        value = _require_type(raw, name, float, raw)
        if not 0.0 <= value <= 1.0:
            raise SchemaError(name, f"value {value} outside [0, 1]", raw)
    return raw


VALIDATORS: dict[str, Callable[[Any], Any]] = {
    "context-prediction": validate_context_response,
    "rule-update": validate_rule_update_response,
    "translation": validate_translation_response,
}


# --- cassette ---------------------------------------------------------------


def request_key(role: str, prompt: str, schema_version: str) -> str:
    digest = hashlib.sha256()
    for part in (role, prompt, schema_version):
        digest.update(part.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


@dataclass
class Cassette:
    """Recorded request/response pairs, stored as a JSON array of entries
    with a stable key order so rewrites are diff-friendly."""

    path: Path
    entries: dict[str, dict] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "Cassette":
        path = Path(path)
        data = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(data, list):
            raise ValueError(f"cassette {path}: expected a JSON array")
        entries = {}
        for i, entry in enumerate(data):
            if not isinstance(entry, dict) or "key" not in entry or "response" not in entry:
                raise ValueError(f"cassette {path}: entry {i} malformed")
            entries[entry["key"]] = entry
        return cls(path=path, entries=entries)

    @classmethod
    def fresh(cls, path: str | Path) -> "Cassette":
        return cls(path=Path(path))

    def lookup(self, key: str, role: str) -> Any:
        entry = self.entries.get(key)
        if entry is None:
            raise CassetteMiss(key, role)
        return entry["response"]

    def record(self, key: str, request: dict, response: Any) -> None:
        self.entries[key] = {
            "key": key,
            "request": request,
            "response": response,
            "recorded_at": datetime.now(timezone.utc).isoformat(),
        }

    def save(self) -> None:
        ordered = [
            {k: entry[k] for k in ("key", "request", "response", "recorded_at")}
            for entry in sorted(self.entries.values(), key=lambda e: e["key"])
        ]
        tmp = self.path.with_name(self.path.name + ".tmp")
        tmp.write_text(json.dumps(ordered, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, self.path)


# --- client -----------------------------------------------------------------


class LlmClient:
    """Synchronous model client for one backend configuration.

    Remote calls retry on transport errors and 5xx responses with exponential
    backoff; 4xx responses fail immediately.  With ``record`` set, successful
    responses are appended to the cassette.  In cassette mode no network is
    touched at all.
    """

    def __init__(
        self,
        config: BackendConfig,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if config.mode is BackendMode.DETERMINISTIC:
            raise ValueError("deterministic mode does not use a model client")
        self.config = config
        self._sleep = sleep
        self._templates = {role: load_prompt_template(role) for role in ROLES}
        self._cassette: Cassette | None = None
        if config.mode is BackendMode.CASSETTE:
            self._cassette = Cassette.load(config.cassette_path)
        elif config.record:
            path = Path(config.cassette_path)
            self._cassette = Cassette.load(path) if path.is_file() else Cassette.fresh(path)
        self._client: httpx.Client | None = None
        if config.mode is BackendMode.REMOTE:
            self._client = httpx.Client(
                transport=transport, timeout=config.timeout_s
            )

    def close(self) -> None:
        if self._client is not None:
            self._client.close()

    def __enter__(self) -> "LlmClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def call(self, role: str, payload: dict) -> Any:
        """Render the role prompt, obtain a response (network or cassette),
        validate it against the role schema, and return the validated value."""
        template = self._templates[role]
        prompt = template.render(payload)
        key = request_key(role, prompt, template.schema_version)

        if self.config.mode is BackendMode.CASSETTE:
            raw = self._cassette.lookup(key, role)
        else:
            raw = self._post(role, prompt, key)
        validated = VALIDATORS[role](raw)
        if self.config.mode is BackendMode.REMOTE and self.config.record:
            self._cassette.record(
                key,
                {"role": role, "prompt": prompt, "schema_version": template.schema_version},
                raw,
            )
            self._cassette.save()
        return validated

    def _post(self, role: str, prompt: str, key: str) -> Any:
        credential = os.environ.get(self.config.credential_env or "")
        if not credential:
            raise BackendError(
                f"credential variable {self.config.credential_env!r} is not set"
            )
        body = {
            "model": self.config.model,
            "role": role,
            "prompt": prompt,
            "request_key": key,
        }
        headers = {"Authorization": f"Bearer {credential}"}
        attempts = self.config.max_retries + 1
        delay = 0.5
        last_error = "no attempt made"
        for attempt in range(attempts):
            try:
                response = self._client.post(
                    self.config.endpoint, json=body, headers=headers
                )
            except httpx.HTTPError as exc:
                last_error = f"transport error: {exc}"
            else:
                if response.status_code < 400:
                    try:
                        return response.json()
                    except ValueError as exc:
                        raise SchemaError("", f"response is not JSON: {exc}", response.text)
                if response.status_code < 500:
                    raise BackendError(
                        f"{role} request rejected with HTTP {response.status_code}: "
                        f"{response.text[:200]}"
                    )
                last_error = f"HTTP {response.status_code}"
            if attempt + 1 < attempts:
                self._sleep(delay)
                delay *= 2
        raise BackendError(f"{role} request failed after {attempts} attempts ({last_error})")
