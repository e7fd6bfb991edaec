"""Episode and condition runners.

A condition is a named (scenario, preference source, policy) triple executed
for R seeded runs.  Two preference sources exist:

* ``Fixed`` pins the preference vector for the whole condition and never
  touches rule memory, so behavior under it cannot depend on stored rules.
* ``Pipeline`` starts each episode from a copy of a rule store, replays a
  feedback script through the rule updater and translator, and re-translates
  whenever a scripted mid-episode feedback fires.

World randomization is derived from (scenario seed, condition seed, run
index) only, so two conditions run with the same seed see bit-identical
worlds per run index and differ purely in the preference vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..context import extract_context
from ..rules import Feedback, RuleStore, update_rules
from ..translator import NEUTRAL, PreferenceVector, translate
from ..morl.policy import LinearQPolicy
from ..morl.sim import NavEnv
from ..morl.world import Scenario
from .metrics import EpisodeMetrics, EpisodeTrace, aggregate, metrics_from_trace

BASELINE_LAMBDA = NEUTRAL.as_tuple()


@dataclass(frozen=True)
class FeedbackEvent:
    """One scripted feedback sentence; fires at episode start or at a step."""

    text: str
    at_step: int | None = None  # None means at episode start

    @property
    def at_start(self) -> bool:
        return self.at_step is None


def load_feedback_script(path: str | Path) -> tuple[FeedbackEvent, ...]:
    """Parse a feedback script: a JSON array of {"text", "at_start" | "at_step"}."""
    raw = Path(path).read_text(encoding="utf-8")
    data = json.loads(raw)
    if not isinstance(data, list):
        raise ValueError("feedback script: expected a JSON array")
    events = []
    for i, entry in enumerate(data):
        where = f"feedback script entry {i}"
        if not isinstance(entry, dict):
            raise ValueError(f"{where}: expected an object")
        text = entry.get("text")
        if not isinstance(text, str) or not text.strip():
            raise ValueError(f"{where}: 'text' must be a non-empty string")
        has_start = "at_start" in entry
        has_step = "at_step" in entry
        if has_start == has_step:
            raise ValueError(f"{where}: exactly one of 'at_start' or 'at_step' required")
        if has_start:
            if entry["at_start"] is not True:
                raise ValueError(f"{where}: 'at_start' must be true")
            events.append(FeedbackEvent(text=text))
        else:
            step = entry["at_step"]
            if isinstance(step, bool) or not isinstance(step, int) or step < 0:
                raise ValueError(f"{where}: 'at_step' must be a non-negative integer")
            events.append(FeedbackEvent(text=text, at_step=step))
    return tuple(events)


@dataclass(frozen=True)
class Fixed:
    vector: PreferenceVector


@dataclass(frozen=True)
class Pipeline:
    script: tuple[FeedbackEvent, ...] = ()
    store: RuleStore | None = None


LambdaSource = Fixed | Pipeline


class _FixedSchedule:
    def __init__(self, vector: PreferenceVector):
        self._lam = vector.as_array()

    def reset(self, env: NavEnv) -> np.ndarray:
        return self._lam

    def before_step(self, env: NavEnv, step_index: int) -> np.ndarray:
        return self._lam


class _PipelineSchedule:
    """Replays the feedback script; the rule store is copied fresh per episode
    so runs stay independent."""

    def __init__(self, source: Pipeline):
        self._source = source
        self._store: RuleStore = RuleStore()
        self._lam = NEUTRAL.as_array()

    def _context(self, env: NavEnv):
        return extract_context(env.world, (env.x, env.y))

    def _apply(self, env: NavEnv, events) -> None:
        if not events:
            return
        context = self._context(env)
        for event in events:
            update_rules(self._store, Feedback(event.text), context)
        self._lam = translate(self._store, context).vector.as_array()

    def reset(self, env: NavEnv) -> np.ndarray:
        base = self._source.store
        self._store = base.copy() if base is not None else RuleStore()
        context = self._context(env)
        for event in self._source.script:
            if event.at_start:
                update_rules(self._store, Feedback(event.text), context)
        self._lam = translate(self._store, context).vector.as_array()
        return self._lam

    def before_step(self, env: NavEnv, step_index: int) -> np.ndarray:
        due = [e for e in self._source.script if e.at_step == step_index]
        self._apply(env, due)
        return self._lam


def _schedule_for(source: LambdaSource):
    if isinstance(source, Fixed):
        return _FixedSchedule(source.vector)
    if isinstance(source, Pipeline):
        return _PipelineSchedule(source)
    raise TypeError(f"unknown preference source {type(source).__name__}")


def run_episode(
    env: NavEnv,
    policy: LinearQPolicy,
    source: LambdaSource,
    rng: np.random.Generator | None = None,
) -> tuple[EpisodeMetrics, EpisodeTrace]:
    """Run one greedy episode to termination and return its metrics and the
    raw trace they were computed from."""
    schedule = _schedule_for(source)
    obs = env.reset(rng)
    lam = schedule.reset(env)
    trace = EpisodeTrace(
        start=(env.world.start[0], env.world.start[1]),
        goal=env.world.goal,
    )
    trace.record(env.x, env.y, env.world, lam)
    while True:
        lam = schedule.before_step(env, env.steps)
        action = policy.act(obs, lam)
        obs, _, outcome = env.step(action)
        trace.record(env.x, env.y, env.world, lam)
        if outcome.terminal:
            trace.outcome = outcome
            break
    return metrics_from_trace(trace), trace


def episode_rng(scenario: Scenario, seed: int, run_index: int) -> np.random.Generator:
    """World randomization stream for one run; independent of the condition."""
    return np.random.default_rng(
        np.random.SeedSequence([int(scenario.seed), int(seed), int(run_index)])
    )


@dataclass(frozen=True)
class ConditionReport:
    name: str
    scenario: str
    runs: int
    seed: int
    policy_checksum: str
    metrics: dict[str, tuple[float, float, int]]
    episodes: tuple[EpisodeMetrics, ...] = field(repr=False, default=())
    baseline_lambda: tuple[float, float, float, float] = BASELINE_LAMBDA


def run_condition(
    scenario: Scenario,
    source: LambdaSource,
    policy: LinearQPolicy,
    runs: int = 20,
    seed: int = 0,
    name: str = "condition",
) -> ConditionReport:
    if runs < 1:
        raise ValueError("runs must be >= 1")
    env = NavEnv(scenario)
    episodes: list[EpisodeMetrics] = []
    for run_index in range(runs):
        metrics, _ = run_episode(env, policy, source, episode_rng(scenario, seed, run_index))
        episodes.append(metrics)
    return ConditionReport(
        name=name,
        scenario=scenario.name,
        runs=runs,
        seed=seed,
        policy_checksum=policy.checksum(),
        metrics=aggregate(episodes),
        episodes=tuple(episodes),
    )
