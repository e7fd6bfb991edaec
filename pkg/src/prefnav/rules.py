"""Persistent preference rules: types, update semantics, matching, storage.

A rule couples a condition (where it applies) with effect levels on the four
tunable objectives.  Feedback sentences become rules through three operations:

* ADD        - no related rule exists for the condition.
* MODIFY     - a rule with the same condition touches an overlapping objective
               and the new level does not reverse its direction.
* DELETE_ADD - the new level reverses direction (for example far -> close), so
               the old rule is removed and a fresh one is created.

Direction is the sign of (level - 0.5); a reversal is a strict sign flip.
Storage is a single JSON document with a monotone sequence counter that
timestamps every create and update, so recency comparisons never need clocks.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .context import SceneContext, canonical_room, normalize_label, room_display_name

OBJECTIVE_ORDER = ("effic", "odist", "hdist", "velocity")

BASELINE_OBJECTIVES = (
    ("reach_goal", "Reach the navigation goal."),
    ("avoid_collisions", "Never collide with obstacles, walls, or people."),
)


class Objective(str, Enum):
    EFFIC = "effic"
    ODIST = "odist"
    HDIST = "hdist"
    VELOCITY = "velocity"


class Level(float, Enum):
    LOW = 0.1
    MEDIUM = 0.5
    HIGH = 0.9


DEFAULT_LEVEL = 0.5

_LEVEL_NAMES = {0.1: "low", 0.5: "medium", 0.9: "high"}
_NAME_LEVELS = {name: value for value, name in _LEVEL_NAMES.items()}


@dataclass(frozen=True)
class EffectDirective:
    objective: Objective
    level: Level


@dataclass(frozen=True)
class Feedback:
    """A single user utterance handed to the rule updater."""

    text: str
    timestamp_s: float = 0.0
    episode: str | None = None

    def __post_init__(self):
        if not isinstance(self.text, str) or not self.text.strip():
            raise ValueError("feedback text must be non-empty")


class RuleStoreError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


def direction(level: float) -> int:
    """-1 below the neutral midpoint, +1 above it, 0 at it."""
    if level > 0.5:
        return 1
    if level < 0.5:
        return -1
    return 0


@dataclass(frozen=True)
class RuleCondition:
    """Absent (None / empty) fields are wildcards that match any context."""

    room_type: str | None = None
    lighting: str | None = None
    human_present: bool | None = None
    required_objects: tuple[str, ...] = ()

    def __post_init__(self):
        if self.room_type is not None:
            object.__setattr__(self, "room_type", canonical_room(self.room_type))
        object.__setattr__(
            self,
            "required_objects",
            tuple(sorted(normalize_label(o) for o in self.required_objects if normalize_label(o))),
        )

    def is_unconditional(self) -> bool:
        return (
            self.room_type is None
            and self.lighting is None
            and self.human_present is None
            and not self.required_objects
        )

    def matches(self, context: SceneContext) -> bool:
        if self.room_type is not None and self.room_type.lower() != context.room_type.lower():
            return False
        if self.lighting is not None and self.lighting != context.lighting.value:
            return False
        if self.human_present is not None and self.human_present != context.human_present:
            return False
        if self.required_objects:
            labels = [normalize_label(l) for l in context.object_labels()]
            for phrase in self.required_objects:
                if not any(_labels_match(phrase, label) for label in labels):
                    return False
        return True

    def describe(self) -> str:
        parts = []
        if self.room_type is not None:
            parts.append(f"in the {room_display_name(self.room_type)}")
        if self.lighting is not None:
            parts.append(f"in {self.lighting.lower()} light")
        if self.human_present is True:
            parts.append("when people are around")
        elif self.human_present is False:
            parts.append("when no one is around")
        if self.required_objects:
            parts.append("near " + ", ".join(self.required_objects))
        return " and ".join(parts) if parts else "in any context"

    def to_dict(self) -> dict:
        data: dict = {}
        if self.room_type is not None:
            data["room_type"] = self.room_type
        if self.lighting is not None:
            data["lighting"] = self.lighting
        if self.human_present is not None:
            data["human_present"] = self.human_present
        if self.required_objects:
            data["required_objects"] = list(self.required_objects)
        return data


def _labels_match(a: str, b: str) -> bool:
    """Equality with trailing-plural tolerance: 'glass bottles' ~ 'glass bottle'."""
    if a == b:
        return True
    return a.rstrip("s") == b.rstrip("s")


@dataclass
class Rule:
    rule_id: str
    preference_text: str
    condition: RuleCondition
    effects: dict[str, float]
    explanation: str
    created_seq: int
    updated_seq: int

    def to_dict(self) -> dict:
        effects = []
        for objective in OBJECTIVE_ORDER:
            if objective not in self.effects:
                continue
            value = self.effects[objective]
            if value in _LEVEL_NAMES:
                effects.append({"objective": objective, "level": _LEVEL_NAMES[value]})
            else:
                effects.append({"objective": objective, "value": value})
        return {
            "id": self.rule_id,
            "preference_text": self.preference_text,
            "condition": self.condition.to_dict(),
            "effects": effects,
            "explanation": self.explanation,
            "created_seq": self.created_seq,
            "updated_seq": self.updated_seq,
        }


class RuleOp(str, Enum):
    ADD = "add"
    MODIFY = "modify"
    DELETE_ADD = "delete_add"
    NOOP = "noop"


@dataclass(frozen=True)
class UpdateResult:
    """Change report for one feedback application."""

    operation: RuleOp
    rule: Rule
    removed: Rule | None = None


@dataclass
class RuleStore:
    next_seq: int = 1
    rules: list[Rule] = field(default_factory=list)

    def get(self, rule_id: str) -> Rule:
        for rule in self.rules:
            if rule.rule_id == rule_id:
                return rule
        raise KeyError(rule_id)

    def allocate_seq(self) -> int:
        seq = self.next_seq
        self.next_seq += 1
        return seq

    def copy(self) -> "RuleStore":
        return loads_rules(dumps_rules(self))


def _explanation(effects: dict[str, float], condition: RuleCondition) -> str:
    levels = ", ".join(f"{k}={effects[k]:.2f}" for k in OBJECTIVE_ORDER if k in effects)
    return f"Sets {levels} {condition.describe()}."


def _condition_from_hints(hints, context: SceneContext) -> RuleCondition:
    room = hints.room_type
    if hints.room_from_context:
        room = context.room_type
    human = hints.human_present
    if hints.human_from_context:
        human = True
    return RuleCondition(
        room_type=room,
        lighting=hints.lighting,
        human_present=human,
        required_objects=hints.required_objects,
    )


def update_rules(store: RuleStore, feedback: Feedback | str, context: SceneContext) -> UpdateResult:
    """Fold one feedback sentence into the store.

    Propagates ``UnparseablePreference`` and ``BaselineConflict`` from the
    grammar, leaving the store untouched.  Returns which operation was applied
    and the resulting rule.
    """
    from .grammar import parse_preference  # local import: grammar uses our types

    text = feedback.text if isinstance(feedback, Feedback) else str(feedback)
    parsed = parse_preference(text)
    condition = _condition_from_hints(parsed.condition, context)
    effects = {d.objective.value: float(d.level.value) for d in parsed.effects}
    return apply_update(store, text, condition, effects)


def apply_update(store: RuleStore, text: str, condition: RuleCondition,
                 effects: dict[str, float]) -> UpdateResult:
    """Fold an already-interpreted directive set into the store: extend the
    newest same-condition rule unless the new effects reverse one of its
    levels, in which case the old rule is replaced outright."""
    if not effects:
        raise RuleStoreError("effects", "at least one objective effect required")
    for name, value in effects.items():
        if name not in {o.value for o in Objective}:
            raise RuleStoreError("effects", f"unknown objective {name!r}")
        if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
            raise RuleStoreError("effects", f"{name}: level {value!r} outside [0, 1]")

    candidates = [
        rule
        for rule in store.rules
        if rule.condition == condition and any(k in rule.effects for k in effects)
    ]
    candidate = max(candidates, key=lambda r: r.updated_seq) if candidates else None

    if candidate is not None:
        # Re-asserting the exact same directive must not touch the store, or
        # repeated feedback would churn sequence numbers and on-disk bytes.
        if candidate.preference_text == text and all(
            candidate.effects.get(k) == v for k, v in effects.items()
        ):
            return UpdateResult(RuleOp.NOOP, candidate)
        reversal = any(
            direction(effects[k]) * direction(candidate.effects[k]) == -1
            for k in effects
            if k in candidate.effects
        )
        if not reversal:
            candidate.effects.update(effects)
            candidate.preference_text = text
            candidate.explanation = _explanation(candidate.effects, condition)
            candidate.updated_seq = store.allocate_seq()
            return UpdateResult(RuleOp.MODIFY, candidate)
        store.rules.remove(candidate)
        rule = _new_rule(store, text, condition, effects)
        return UpdateResult(RuleOp.DELETE_ADD, rule, removed=candidate)

    rule = _new_rule(store, text, condition, effects)
    return UpdateResult(RuleOp.ADD, rule)


def _new_rule(store: RuleStore, text: str, condition: RuleCondition, effects: dict[str, float]) -> Rule:
    seq = store.allocate_seq()
    rule = Rule(
        rule_id=f"r-{seq:06d}",
        preference_text=text,
        condition=condition,
        effects=dict(effects),
        explanation=_explanation(effects, condition),
        created_seq=seq,
        updated_seq=seq,
    )
    store.rules.append(rule)
    return rule


def delete_rule(store: RuleStore, rule_id: str) -> Rule:
    rule = store.get(rule_id)
    store.rules.remove(rule)
    return rule


def match_rules(store: RuleStore, context: SceneContext) -> list[Rule]:
    """Every rule whose condition matches the context, in creation order."""
    return [rule for rule in store.rules if rule.condition.matches(context)]


# --- persistence ------------------------------------------------------------

def dumps_rules(store: RuleStore) -> str:
    doc = {
        "next_seq": store.next_seq,
        "rules": [rule.to_dict() for rule in store.rules],
    }
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def save_rules(store: RuleStore, path: str | Path) -> None:
    """Write-then-rename so a reader never observes a half-written store."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(dumps_rules(store), encoding="utf-8")
    os.replace(tmp, path)


def _require(data: dict, key: str, kind, path: str):
    full = f"{path}.{key}" if path else key
    if key not in data:
        raise RuleStoreError(full, "missing required key")
    value = data[key]
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise RuleStoreError(full, f"expected an integer, got {type(value).__name__}")
        return value
    if not isinstance(value, kind):
        raise RuleStoreError(full, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


_CONDITION_KEYS = ("room_type", "lighting", "human_present", "required_objects")


def _condition_from_dict(data: dict, path: str) -> RuleCondition:
    if not isinstance(data, dict):
        raise RuleStoreError(path, "expected an object")
    for key in data:
        if key not in _CONDITION_KEYS:
            raise RuleStoreError(f"{path}.{key}", "unknown condition key")
    room = data.get("room_type")
    if room is not None and (not isinstance(room, str) or not room.strip()):
        raise RuleStoreError(f"{path}.room_type", "expected a non-empty string")
    lighting = data.get("lighting")
    if lighting is not None and lighting not in ("Bright", "Gentle", "Low"):
        raise RuleStoreError(f"{path}.lighting", f"unknown lighting {lighting!r}")
    human = data.get("human_present")
    if human is not None and not isinstance(human, bool):
        raise RuleStoreError(f"{path}.human_present", "expected a boolean")
    objs = data.get("required_objects", [])
    if not isinstance(objs, list) or not all(isinstance(o, str) and o.strip() for o in objs):
        raise RuleStoreError(f"{path}.required_objects", "expected a list of non-empty strings")
    return RuleCondition(
        room_type=room, lighting=lighting, human_present=human, required_objects=tuple(objs)
    )


def _effects_from_list(data, path: str) -> dict[str, float]:
    if not isinstance(data, list) or not data:
        raise RuleStoreError(path, "expected a non-empty array of effect directives")
    effects: dict[str, float] = {}
    for i, entry in enumerate(data):
        entry_path = f"{path}[{i}]"
        if not isinstance(entry, dict):
            raise RuleStoreError(entry_path, "expected an object")
        objective = _require(entry, "objective", str, entry_path)
        if objective not in OBJECTIVE_ORDER:
            raise RuleStoreError(f"{entry_path}.objective", f"unknown objective {objective!r}")
        if objective in effects:
            raise RuleStoreError(f"{entry_path}.objective", f"duplicate objective {objective!r}")
        has_level = "level" in entry
        has_value = "value" in entry
        if has_level == has_value:
            raise RuleStoreError(entry_path, "exactly one of 'level' or 'value' is required")
        if has_level:
            name = entry["level"]
            if name not in _NAME_LEVELS:
                raise RuleStoreError(f"{entry_path}.level", f"unknown level {name!r}")
            effects[objective] = _NAME_LEVELS[name]
        else:
            value = entry["value"]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise RuleStoreError(f"{entry_path}.value", "expected a number")
            value = float(value)
            if not 0.0 <= value <= 1.0:
                raise RuleStoreError(f"{entry_path}.value", f"level {value} outside [0, 1]")
            effects[objective] = value
    return effects


def _rule_from_dict(data: dict, path: str) -> Rule:
    if not isinstance(data, dict):
        raise RuleStoreError(path, "expected an object")
    condition = _condition_from_dict(_require(data, "condition", dict, path), f"{path}.condition")
    effects = _effects_from_list(_require(data, "effects", list, path), f"{path}.effects")
    explanation = _require(data, "explanation", str, path)
    if not explanation:
        raise RuleStoreError(f"{path}.explanation", "explanation must be non-empty")
    rule = Rule(
        rule_id=_require(data, "id", str, path),
        preference_text=_require(data, "preference_text", str, path),
        condition=condition,
        effects=effects,
        explanation=explanation,
        created_seq=_require(data, "created_seq", int, path),
        updated_seq=_require(data, "updated_seq", int, path),
    )
    if rule.updated_seq < rule.created_seq:
        raise RuleStoreError(f"{path}.updated_seq", "updated_seq below created_seq")
    return rule


def loads_rules(raw: str | bytes) -> RuleStore:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise RuleStoreError("$", f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise RuleStoreError("$", "expected a top-level object")
    next_seq = _require(data, "next_seq", int, "")
    rules_raw = _require(data, "rules", list, "")
    rules = [_rule_from_dict(r, f"rules[{i}]") for i, r in enumerate(rules_raw)]
    seen: set[str] = set()
    previous_created = 0
    for i, rule in enumerate(rules):
        if rule.rule_id in seen:
            raise RuleStoreError(f"rules[{i}].id", f"duplicate rule id {rule.rule_id!r}")
        seen.add(rule.rule_id)
        if rule.created_seq <= previous_created:
            raise RuleStoreError(f"rules[{i}].created_seq", "created_seq not strictly increasing")
        previous_created = rule.created_seq
        if rule.created_seq >= next_seq or rule.updated_seq >= next_seq:
            raise RuleStoreError(f"rules[{i}]", "sequence number not below next_seq")
    return RuleStore(next_seq=next_seq, rules=rules)


def load_rules(path: str | Path) -> RuleStore:
    return loads_rules(Path(path).read_text(encoding="utf-8"))
