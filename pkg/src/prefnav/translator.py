"""Preference translation: resolve the rule store against a scene context to
produce the four-component preference vector that conditions the policy.

Vector order is (effic, odist, hdist, velocity).  In the continuous domain the
level a governing rule carries is used as-is (clamped to [0,1]); the discrete
domain snaps every component to the eleven-point grid {0.0, 0.1, ..., 1.0}
with round-half-up.  Objectives no rule touches sit at the neutral 0.5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .context import SceneContext
from .rules import DEFAULT_LEVEL, OBJECTIVE_ORDER, Rule, RuleStore, match_rules

GRID_STEP = 0.1
COMPONENTS = OBJECTIVE_ORDER  # ("effic", "odist", "hdist", "velocity")
DOMAINS = ("continuous", "discrete")

_GT_LEVELS = {"min": 0.0, "med": 0.5, "max": 1.0}


def discretize(x: float) -> float:
    """Snap to the 0.1 grid, rounding half up: 0.84 -> 0.8, 0.85 -> 0.9."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot discretize non-finite value {x!r}")
    snapped = math.floor(x * 10.0 + 0.5) / 10.0
    return min(1.0, max(0.0, snapped))


@dataclass(frozen=True)
class PreferenceVector:
    effic: float = DEFAULT_LEVEL
    odist: float = DEFAULT_LEVEL
    hdist: float = DEFAULT_LEVEL
    velocity: float = DEFAULT_LEVEL

    def __post_init__(self):
        for name in COMPONENTS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{name}: expected a number, got {type(value).__name__}")
            value = float(value)
            if not math.isfinite(value) or not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}: {value} outside [0, 1]")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.effic, self.odist, self.hdist, self.velocity)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=np.float64)

    def to_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in COMPONENTS}

    @classmethod
    def from_dict(cls, data: dict) -> "PreferenceVector":
        if not isinstance(data, dict):
            raise ValueError("preference vector: expected an object")
        unknown = set(data) - set(COMPONENTS)
        if unknown:
            raise ValueError(f"preference vector: unknown component {sorted(unknown)[0]!r}")
        missing = [name for name in COMPONENTS if name not in data]
        if missing:
            raise ValueError(f"preference vector: missing component {missing[0]!r}")
        return cls(**{name: data[name] for name in COMPONENTS})

    def snapped(self) -> "PreferenceVector":
        return PreferenceVector(*(discretize(v) for v in self.as_tuple()))

    def weights(self) -> np.ndarray:
        """Full scalarization weights over the six reward components.  The
        goal and collision weights are pinned at 1.0 and are not tunable."""
        return np.array([1.0, 1.0, *self.as_tuple()], dtype=np.float64)


NEUTRAL = PreferenceVector()


def make_ground_truth(effic: str = "med", odist: str = "med",
                      hdist: str = "med", velocity: str = "med") -> PreferenceVector:
    """Anchor levels for evaluation fixtures: min -> 0.0, med -> 0.5, max -> 1.0."""
    values = []
    for name, level in zip(COMPONENTS, (effic, odist, hdist, velocity)):
        if level not in _GT_LEVELS:
            raise ValueError(f"{name}: unknown level {level!r}; use min/med/max")
        values.append(_GT_LEVELS[level])
    return PreferenceVector(*values)


def scalarize(rewards: Sequence[float] | np.ndarray, weights: Sequence[float] | np.ndarray) -> float:
    """Weighted sum of a reward vector.  Linear in both arguments."""
    r = np.asarray(rewards, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if r.shape != w.shape:
        raise ValueError(f"shape mismatch: rewards {r.shape} vs weights {w.shape}")
    return float(np.dot(r, w))


@dataclass(frozen=True)
class TranslationResult:
    vector: PreferenceVector
    applied_rules: tuple[str, ...]
    explanation: str


def translate(store: RuleStore, context: SceneContext, domain: str = "continuous") -> TranslationResult:
    """Deterministic translation: match rules, take the most recently updated
    matching rule per objective, default untouched objectives to 0.5."""
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}; use 'continuous' or 'discrete'")
    governing: dict[str, Rule] = {}
    for rule in match_rules(store, context):
        for objective in rule.effects:
            holder = governing.get(objective)
            if holder is None or rule.updated_seq > holder.updated_seq:
                governing[objective] = rule
    values: dict[str, float] = {}
    notes: list[str] = []
    applied: list[str] = []
    for name in COMPONENTS:
        rule = governing.get(name)
        if rule is not None:
            value = min(1.0, max(0.0, float(rule.effects[name])))
            if domain == "discrete":
                value = discretize(value)
            values[name] = value
            notes.append(f"{name}={value:.2f} (rule {rule.rule_id})")
            if rule.rule_id not in applied:
                applied.append(rule.rule_id)
        else:
            values[name] = DEFAULT_LEVEL
            notes.append(f"{name}={DEFAULT_LEVEL:.2f} (default)")
    return TranslationResult(
        vector=PreferenceVector(**values),
        applied_rules=tuple(applied),
        explanation="; ".join(notes),
    )


@dataclass(frozen=True)
class EprefReport:
    """Mean preference error: per-component mean absolute deviations plus the
    aggregate.  ``norm='l2'`` swaps the aggregate for the mean euclidean
    distance per instance (alternative metric; componentwise is the default)."""

    per_component: tuple[float, float, float, float]
    mean: float
    norm: str = "componentwise"


def preference_error(
    predicted: Iterable[PreferenceVector],
    truth: Iterable[PreferenceVector],
    norm: str = "componentwise",
) -> EprefReport:
    pred = [p.as_array() for p in predicted]
    true = [t.as_array() for t in truth]
    if len(pred) != len(true):
        raise ValueError(f"length mismatch: {len(pred)} predictions vs {len(true)} truths")
    if not pred:
        raise ValueError("preference_error needs at least one instance")
    diffs = np.abs(np.stack(pred) - np.stack(true))
    per_component = tuple(float(x) for x in diffs.mean(axis=0))
    if norm == "componentwise":
        mean = float(diffs.mean())
    elif norm == "l2":
        mean = float(np.sqrt((diffs**2).sum(axis=1)).mean())
    else:
        raise ValueError(f"unknown norm {norm!r}; use 'componentwise' or 'l2'")
    return EprefReport(per_component=per_component, mean=mean, norm=norm)
