"""Live pipeline runtime: a 10 Hz control loop driving the simulator with
the current preference vector, and a reasoning thread that refreshes the
scene context and re-translates preferences without ever blocking control.

Concurrency contract:

* The control loop reads one immutable ``PipelineSnapshot`` reference per
  tick, so it can never observe fields from two different reasoning cycles.
* Reasoning failures leave the previous snapshot in place and bump a
  per-role failure counter; the robot keeps navigating with the last good
  preference vector.
* Rule mutations go clone -> persist (write-then-rename) -> swap, so a
  process killed at any instant leaves either the old or the new store on
  disk, never a torn file, and in-flight readers keep a consistent store.
"""

from __future__ import annotations

import hashlib
import logging
import queue
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from ..context import SceneContext, extract_context
from ..rules import RuleStore, UpdateResult, dumps_rules, load_rules, save_rules
from ..translator import NEUTRAL, TranslationResult
from ..morl.policy import LinearQPolicy
from ..morl.sim import DT_S, NavEnv, Outcome
from ..morl.world import Scenario, load_scenario
from .adapters import RoleBindings

log = logging.getLogger(__name__)


class Trigger(Enum):
    PERIODIC = "periodic"
    CONTEXT_CHANGED = "context_changed"
    RULES_CHANGED = "rules_changed"


@dataclass(frozen=True)
class PipelineSnapshot:
    """One consistent view of the reasoning pipeline's output."""

    generation: int
    context: SceneContext
    rules_version: str
    translation: TranslationResult
    trigger: str
    updated_at: float
    backend_modes: dict[str, str]


def rules_version(store: RuleStore) -> str:
    return hashlib.sha256(dumps_rules(store).encode("utf-8")).hexdigest()[:12]


@dataclass
class TickStats:
    """Control-loop schedule adherence; delays are tick-start lateness
    relative to the fixed 10 Hz grid.  The raw series is bounded so a
    long-lived server does not grow without limit."""

    late_threshold_s: float = 0.02
    ticks: int = 0
    late: int = 0
    max_delay_s: float = 0.0
    recent_s: deque = field(default_factory=lambda: deque(maxlen=10000))

    def record(self, delay_s: float) -> None:
        self.ticks += 1
        self.max_delay_s = max(self.max_delay_s, delay_s)
        if delay_s > self.late_threshold_s:
            self.late += 1
        self.recent_s.append(delay_s)


class PipelineRuntime:
    """Owns the simulator, the rule store, and both loops.

    ``start()`` launches the control and reasoning threads; ``stop()`` joins
    them.  All public accessors are safe to call from other threads (HTTP
    handlers, websockets).
    """

    def __init__(
        self,
        scenario: Scenario | str,
        policy: LinearQPolicy,
        bindings: RoleBindings,
        rules_path: str | Path | None = None,
        tick_hz: float = 10.0,
        reasoning_period_s: float = 2.0,
        context_refresh_hz: float = 0.5,
        seed: int = 0,
        dwell_ticks: int = 10,
    ):
        if tick_hz <= 0 or reasoning_period_s <= 0 or context_refresh_hz <= 0:
            raise ValueError("tick_hz, reasoning_period_s, context_refresh_hz must be > 0")
        self.scenario = load_scenario(scenario) if isinstance(scenario, str) else scenario
        self.policy = policy
        self.bindings = bindings
        self.rules_path = Path(rules_path) if rules_path is not None else None
        self.tick_period_s = 1.0 / tick_hz
        self.reasoning_period_s = reasoning_period_s
        self.context_refresh_period_s = 1.0 / context_refresh_hz
        self.dwell_ticks = dwell_ticks
        self.seed = seed

        if self.rules_path is not None and self.rules_path.is_file():
            self._store = load_rules(self.rules_path)
        else:
            self._store = RuleStore()
        self._rules_lock = threading.Lock()

        self._sim_lock = threading.Lock()
        self._env = NavEnv(self.scenario)
        self._episode = 0
        self._dwell = 0
        self._seed_seq = np.random.SeedSequence([self.scenario.seed, seed])
        self._reset_env_locked()

        self._snapshot_lock = threading.Lock()
        self._generation = 0
        truth = self._extract_truth()
        self._snapshot = PipelineSnapshot(
            generation=0,
            context=truth,
            rules_version=rules_version(self._store),
            translation=TranslationResult(NEUTRAL, (), "defaults (no reasoning cycle yet)"),
            trigger="startup",
            updated_at=time.time(),
            backend_modes=self._backend_modes(),
        )

        self.failure_counters: dict[str, int] = {
            "context-prediction": 0, "rule-update": 0, "translation": 0,
        }
        self.tick_stats = TickStats()
        self._frame_lock = threading.Lock()
        self._frame: dict = {}
        self._build_frame_locked()

        self._triggers: queue.Queue[Trigger] = queue.Queue()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self.started_at = time.time()

    # --- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        if self._threads:
            raise RuntimeError("runtime already started")
        self._stop.clear()
        control = threading.Thread(target=self._control_loop, name="control", daemon=True)
        reasoning = threading.Thread(target=self._reasoning_loop, name="reasoning", daemon=True)
        self._threads = [control, reasoning]
        for t in self._threads:
            t.start()

    def stop(self) -> None:
        self._stop.set()
        for t in self._threads:
            t.join(timeout=5.0)
        self._threads = []
        self.bindings.close()

    def __enter__(self) -> "PipelineRuntime":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()

    # --- snapshot / state access --------------------------------------------

    @property
    def snapshot(self) -> PipelineSnapshot:
        return self._snapshot

    def latest_frame(self) -> dict:
        with self._frame_lock:
            return self._frame

    def state(self) -> dict:
        with self._sim_lock:
            env = self._env
            return {
                "scenario": self.scenario.name,
                "episode": self._episode,
                "t": env.elapsed_s,
                "steps": env.steps,
                "outcome": None if env.outcome is Outcome.ONGOING else env.outcome.value,
                "robot": {"x": env.x, "y": env.y, "theta": env.theta, "v": env.speed},
                "goal": {"x": env.world.goal[0], "y": env.world.goal[1]},
                "generation": self._snapshot.generation,
            }

    def health(self) -> dict:
        return {
            "status": "ok",
            "backend_modes": self._backend_modes(),
            "failure_counters": dict(self.failure_counters),
            "generation": self._snapshot.generation,
            "ticks": self.tick_stats.ticks,
            "max_tick_delay_ms": self.tick_stats.max_delay_s * 1000.0,
            "uptime_s": time.time() - self.started_at,
        }

    def rules(self) -> dict:
        store = self._store
        return {
            "version": rules_version(store),
            "rules": [rule.to_dict() for rule in store.rules],
        }

    # --- rule mutation -------------------------------------------------------

    def submit_feedback(self, text: str) -> tuple[UpdateResult, TranslationResult]:
        """Apply one feedback sentence through the rule-update backend.

        The new store is persisted before it becomes visible; the returned
        translation reflects the new store against the current context.  A
        RulesChanged trigger refreshes the pipeline snapshot asynchronously.
        """
        if not isinstance(text, str) or not text.strip():
            raise ValueError("feedback text must be a non-empty string")
        context = self._snapshot.context
        with self._rules_lock:
            clone = self._store.copy()
            result = self.bindings.update_rules(clone, text, context)
            self._persist(clone)
            self._store = clone
        translation = self.bindings.translate(self._store, context)
        self._triggers.put(Trigger.RULES_CHANGED)
        return result, translation

    def delete_rule(self, rule_id: str):
        from ..rules import delete_rule

        with self._rules_lock:
            clone = self._store.copy()
            removed = delete_rule(clone, rule_id)  # KeyError on unknown id
            self._persist(clone)
            self._store = clone
        self._triggers.put(Trigger.RULES_CHANGED)
        return removed

    def _persist(self, store: RuleStore) -> None:
        if self.rules_path is not None:
            save_rules(store, self.rules_path)

    # --- scenario control ----------------------------------------------------

    def reset_scenario(self, name: str) -> None:
        scenario = load_scenario(name)  # ScenarioError / FileNotFoundError on bad name
        with self._sim_lock:
            self.scenario = scenario
            self._env = NavEnv(scenario)
            self._episode = 0
            self._dwell = 0
            self._seed_seq = np.random.SeedSequence([scenario.seed, self.seed])
            self._reset_env_locked()
            self._build_frame_locked()
        self._triggers.put(Trigger.CONTEXT_CHANGED)

    def _reset_env_locked(self) -> None:
        child = self._seed_seq.spawn(1)[0]
        self._env.reset(np.random.default_rng(child))
        self._episode += 1

    # --- reasoning -----------------------------------------------------------

    def _backend_modes(self) -> dict[str, str]:
        mode = self.bindings.mode_name
        return {role: mode for role in ("context-prediction", "rule-update", "translation")}

    def _extract_truth(self) -> SceneContext:
        with self._sim_lock:
            return extract_context(self._env.world, (self._env.x, self._env.y))

    def reasoning_cycle(self, trigger: Trigger) -> bool:
        """Run one full reasoning pass and install a new snapshot.  Returns
        False (keeping the old snapshot) if any stage fails."""
        store = self._store
        truth = self._extract_truth()
        try:
            context = self.bindings.predict_context(truth)
        except Exception as exc:
            self.failure_counters["context-prediction"] += 1
            log.warning("context prediction failed (%s); keeping snapshot", exc)
            return False
        try:
            translation = self.bindings.translate(store, context)
        except Exception as exc:
            self.failure_counters["translation"] += 1
            log.warning("translation failed (%s); keeping snapshot", exc)
            return False
        with self._snapshot_lock:
            self._generation += 1
            self._snapshot = PipelineSnapshot(
                generation=self._generation,
                context=context,
                rules_version=rules_version(store),
                translation=translation,
                trigger=trigger.value,
                updated_at=time.time(),
                backend_modes=self._backend_modes(),
            )
        return True

    def _reasoning_loop(self) -> None:
        next_periodic = time.monotonic() + self.reasoning_period_s
        while not self._stop.is_set():
            timeout = max(0.0, next_periodic - time.monotonic())
            try:
                trigger = self._triggers.get(timeout=timeout)
            except queue.Empty:
                trigger = Trigger.PERIODIC
                next_periodic = time.monotonic() + self.reasoning_period_s
            if self._stop.is_set():
                break
            # Coalesce a burst of triggers into one cycle.
            try:
                while True:
                    self._triggers.get_nowait()
            except queue.Empty:
                pass
            self.reasoning_cycle(trigger)

    # --- control -------------------------------------------------------------

    def _build_frame_locked(self) -> None:
        env = self._env
        snapshot = self._snapshot
        frame = {
            "t": round(env.elapsed_s, 3),
            "robot": {
                "x": round(env.x, 4), "y": round(env.y, 4),
                "theta": round(env.theta, 4), "v": round(env.speed, 4),
            },
            "humans": [
                {"x": round(h.x, 4), "y": round(h.y, 4)} for h in env.world.humans
            ],
            "goal": {"x": env.world.goal[0], "y": env.world.goal[1]},
            "lambda": snapshot.translation.vector.to_dict(),
            "generation": snapshot.generation,
            "outcome": None if env.outcome is Outcome.ONGOING else env.outcome.value,
        }
        with self._frame_lock:
            self._frame = frame

    def tick(self) -> None:
        """Advance the simulation by one control step using the preference
        vector of the current snapshot.  Reads the snapshot exactly once."""
        snapshot = self._snapshot
        lam = snapshot.translation.vector.as_array()
        with self._sim_lock:
            env = self._env
            if env.outcome.terminal:
                self._dwell += 1
                if self._dwell >= self.dwell_ticks:
                    self._dwell = 0
                    self._reset_env_locked()
            else:
                action = self.policy.act(env.observe(), lam)
                env.step(action)
            self._build_frame_locked()

    def _control_loop(self) -> None:
        next_tick = time.monotonic() + self.tick_period_s
        while not self._stop.is_set():
            delay = time.monotonic() - next_tick
            if delay < 0:
                self._stop.wait(-delay)
                if self._stop.is_set():
                    break
                delay = time.monotonic() - next_tick
            self.tick_stats.record(max(0.0, delay))
            self.tick()
            next_tick += self.tick_period_s
