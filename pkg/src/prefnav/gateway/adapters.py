"""Per-role reasoning adapters.

Each reasoning role has a deterministic implementation (ground-truth context
extraction, the constrained grammar, the rule-based translator) and a remote
one that goes through ``LlmClient``; cassette playback uses the remote path
with a recorded transport.  The runtime binds one callable per role so the
rest of the pipeline never branches on backend mode.
"""

from __future__ import annotations

import json

from ..context import SceneContext, context_to_dict
from ..grammar import BaselineConflict
from ..rules import (
    Feedback,
    Level,
    RuleCondition,
    RuleStore,
    UpdateResult,
    apply_update,
    match_rules,
    update_rules,
)
from ..translator import COMPONENTS, PreferenceVector, TranslationResult, translate
from .backends import BackendConfig, BackendMode, LlmClient

_NAME_TO_LEVEL = {"low": Level.LOW, "medium": Level.MEDIUM, "high": Level.HIGH}


def llm_predict_context(client: LlmClient, scene_description: str) -> SceneContext:
    raw = client.call("context-prediction", {"scene_description": scene_description})
    return raw  # validator already returns a SceneContext


def llm_update_rules(
    client: LlmClient, store: RuleStore, text: str, context: SceneContext
) -> UpdateResult:
    """Interpret one feedback sentence with the model and fold the resulting
    directives into the store."""
    raw = client.call(
        "rule-update",
        {
            "feedback": text,
            "context": json.dumps(context_to_dict(context), ensure_ascii=False),
        },
    )
    if not raw["effects"]:
        raise BaselineConflict(text, "avoid_collisions")
    effects = {
        e["objective"]: float(_NAME_TO_LEVEL[e["level"]].value) for e in raw["effects"]
    }
    cond = raw.get("condition", {})
    objects = cond.get("required_objects", [])
    condition = RuleCondition(
        room_type=cond.get("room_type"),
        lighting=cond.get("lighting"),
        human_present=cond.get("human_present"),
        required_objects=tuple(str(o) for o in objects),
    )
    return apply_update(store, text, condition, effects)


def llm_translate(
    client: LlmClient, store: RuleStore, context: SceneContext
) -> TranslationResult:
    applicable = match_rules(store, context)
    rules_doc = json.dumps([r.to_dict() for r in applicable], ensure_ascii=False)
    raw = client.call(
        "translation",
        {
            "rules": rules_doc,
            "context": json.dumps(context_to_dict(context), ensure_ascii=False),
        },
    )
    vector = PreferenceVector(**{name: raw[name] for name in COMPONENTS})
    return TranslationResult(
        vector=vector,
        applied_rules=tuple(r.rule_id for r in applicable),
        explanation=str(raw.get("explanation", "model translation")),
    )


class RoleBindings:
    """Callable per reasoning role, resolved from one backend config.  In
    deterministic mode no client exists and the offline implementations are
    used directly."""

    def __init__(self, config: BackendConfig, client: LlmClient | None = None):
        self.config = config
        if config.mode is BackendMode.DETERMINISTIC:
            self.client = None
        else:
            self.client = client if client is not None else LlmClient(config)

    @property
    def mode_name(self) -> str:
        return self.config.mode.value

    def close(self) -> None:
        if self.client is not None:
            self.client.close()

    def predict_context(self, truth: SceneContext) -> SceneContext:
        """Predict the scene context given the ground-truth extraction; the
        deterministic binding returns the truth unchanged, the others hand the
        description to the model.  Callers extract the truth themselves so any
        world locking stays outside the (possibly slow) model call."""
        if self.client is None:
            return truth
        return llm_predict_context(self.client, truth.scene_description)

    def update_rules(self, store: RuleStore, text: str, context: SceneContext) -> UpdateResult:
        if self.client is None:
            return update_rules(store, Feedback(text), context)
        return llm_update_rules(self.client, store, text, context)

    def translate(self, store: RuleStore, context: SceneContext) -> TranslationResult:
        if self.client is None:
            return translate(store, context)
        return llm_translate(self.client, store, context)
