"""Live gateway: model backends with record/replay, the 10 Hz pipeline
runtime, and the HTTP/websocket API."""

from .backends import (
    BackendConfig,
    BackendError,
    BackendMode,
    Cassette,
    CassetteMiss,
    LlmClient,
    PromptTemplate,
    SchemaError,
    load_prompt_template,
    request_key,
)
from .adapters import RoleBindings, llm_predict_context, llm_translate, llm_update_rules
from .runtime import PipelineRuntime, PipelineSnapshot, TickStats, Trigger, rules_version

__all__ = [
    "BackendConfig",
    "BackendError",
    "BackendMode",
    "Cassette",
    "CassetteMiss",
    "LlmClient",
    "PipelineRuntime",
    "PipelineSnapshot",
    "PromptTemplate",
    "RoleBindings",
    "SchemaError",
    "TickStats",
    "Trigger",
    "llm_predict_context",
    "llm_translate",
    "llm_update_rules",
    "load_prompt_template",
    "request_key",
    "rules_version",
]
