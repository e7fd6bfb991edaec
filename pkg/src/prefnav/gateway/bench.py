"""Offline latency benchmark: runs the live runtime with an artificially
slow reasoning backend and reports how well the control loop held its
schedule.  This is the check that reasoning latency cannot leak into
control-tick latency."""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..context import SceneContext
from ..morl.policy import LinearQPolicy
from ..morl.world import Scenario
from ..rules import RuleStore
from ..translator import TranslationResult
from .adapters import RoleBindings
from .backends import BackendConfig
from .runtime import PipelineRuntime, TickStats


class DelayedBindings(RoleBindings):
    """Deterministic bindings with a fixed artificial delay on every
    reasoning stage; the control loop must be unaffected."""

    def __init__(self, delay_s: float):
        super().__init__(BackendConfig())
        if delay_s < 0:
            raise ValueError("delay_s must be >= 0")
        self.delay_s = delay_s

    def predict_context(self, truth: SceneContext) -> SceneContext:
        time.sleep(self.delay_s)
        return super().predict_context(truth)

    def translate(self, store: RuleStore, context: SceneContext) -> TranslationResult:
        time.sleep(self.delay_s)
        return super().translate(store, context)


@dataclass(frozen=True)
class BenchReport:
    seconds: float
    tick_hz: float
    reasoning_delay_s: float
    ticks: int
    late: int
    max_delay_ms: float
    reasoning_generations: int

    def render(self) -> str:
        return (
            f"control loop: {self.ticks} ticks over {self.seconds:.1f}s at "
            f"{self.tick_hz:.0f} Hz with a {self.reasoning_delay_s:.1f}s reasoning stall\n"
            f"  ticks late (>20 ms): {self.late}\n"
            f"  max tick delay: {self.max_delay_ms:.2f} ms\n"
            f"  reasoning cycles completed: {self.reasoning_generations}\n"
        )


def run_bench(
    scenario: Scenario | str,
    policy: LinearQPolicy,
    seconds: float = 30.0,
    reasoning_delay_s: float = 2.0,
    tick_hz: float = 10.0,
) -> BenchReport:
    if seconds <= 0:
        raise ValueError("seconds must be > 0")
    runtime = PipelineRuntime(
        scenario=scenario,
        policy=policy,
        bindings=DelayedBindings(reasoning_delay_s),
        tick_hz=tick_hz,
    )
    with runtime:
        time.sleep(seconds)
    stats: TickStats = runtime.tick_stats
    return BenchReport(
        seconds=seconds,
        tick_hz=tick_hz,
        reasoning_delay_s=reasoning_delay_s,
        ticks=stats.ticks,
        late=stats.late,
        max_delay_ms=stats.max_delay_s * 1000.0,
        reasoning_generations=runtime.snapshot.generation,
    )
