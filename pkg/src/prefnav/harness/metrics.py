"""Per-episode behavioral metrics, computed from a recorded trace.

The runner logs raw per-step quantities (position, nearest-human distance,
nearest-fragile-surface distance); everything reported is derived from that
log by pure functions, so tests can recompute each metric independently
from the same trace.

Distance conventions: the human-distance series is center to center; the
fragile-object series is robot center to the nearest fragile obstacle
surface, since center distance is meaningless for long shelf boxes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..morl.sim import DT_S, Outcome
from ..morl.world import World


@dataclass
class EpisodeTrace:
    """Raw per-step log for one episode; index 0 is the reset state."""

    start: tuple[float, float]
    goal: tuple[float, float]
    positions: list[tuple[float, float]] = field(default_factory=list)
    human_distances: list[float] = field(default_factory=list)
    fragile_distances: list[float] = field(default_factory=list)
    lambdas: list[tuple[float, float, float, float]] = field(default_factory=list)
    outcome: Outcome = Outcome.ONGOING

    def record(self, x: float, y: float, world: World, lam) -> None:
        self.positions.append((x, y))
        best_h = math.inf
        for h in world.humans:
            best_h = min(best_h, math.hypot(h.x - x, h.y - y))
        self.human_distances.append(best_h)
        self.fragile_distances.append(fragile_surface_distance(world, x, y))
        self.lambdas.append(tuple(float(v) for v in lam))


def fragile_surface_distance(world: World, x: float, y: float) -> float:
    """Distance from a point to the nearest fragile obstacle surface; inf
    when the scenario has none."""
    from ..morl.geometry import box_surface_distance, circle_surface_distance
    from ..morl.world import BoxObstacle

    best = math.inf
    for obs in world.obstacles:
        if not obs.fragile:
            continue
        if isinstance(obs, BoxObstacle):
            d = box_surface_distance(x, y, obs.xmin, obs.ymin, obs.xmax, obs.ymax)
        else:
            d = circle_surface_distance(x, y, obs.cx, obs.cy, obs.radius)
        best = min(best, d)
    return best


@dataclass(frozen=True)
class EpisodeMetrics:
    outcome: Outcome
    steps: int
    trajectory_length: float
    mean_velocity: float
    mean_human_distance: float | None
    mean_object_distance: float | None
    lambda_used: tuple[float, float, float, float]
    start: tuple[float, float]
    goal: tuple[float, float]

    @property
    def goal_reached(self) -> bool:
        return self.outcome is Outcome.GOAL_REACHED

    @property
    def collided(self) -> bool:
        return self.outcome is Outcome.COLLISION


def metrics_from_trace(trace: EpisodeTrace) -> EpisodeMetrics:
    steps = len(trace.positions) - 1
    if steps < 1:
        raise ValueError("trace must contain at least one step")
    pos = np.asarray(trace.positions)
    deltas = np.diff(pos, axis=0)
    trajectory_length = float(np.hypot(deltas[:, 0], deltas[:, 1]).sum())
    mean_velocity = trajectory_length / (steps * DT_S)

    # Time averages over the post-step samples (one per step taken).
    humans = trace.human_distances[1:]
    mean_human = None if math.isinf(humans[0]) else float(np.mean(humans))
    fragiles = trace.fragile_distances[1:]
    mean_object = None if math.isinf(fragiles[0]) else float(np.mean(fragiles))

    return EpisodeMetrics(
        outcome=trace.outcome,
        steps=steps,
        trajectory_length=trajectory_length,
        mean_velocity=mean_velocity,
        mean_human_distance=mean_human,
        mean_object_distance=mean_object,
        lambda_used=trace.lambdas[-1],
        start=trace.start,
        goal=trace.goal,
    )


# Metric extractors for aggregation: name -> (EpisodeMetrics -> float | None).
METRIC_FIELDS = {
    "mean_velocity": lambda m: m.mean_velocity,
    "mean_human_distance": lambda m: m.mean_human_distance,
    "mean_object_distance": lambda m: m.mean_object_distance,
    "trajectory_length": lambda m: m.trajectory_length,
    "steps": lambda m: float(m.steps),
    "goal_rate": lambda m: 1.0 if m.goal_reached else 0.0,
    "collision_rate": lambda m: 1.0 if m.collided else 0.0,
}


def aggregate(episodes: list[EpisodeMetrics]) -> dict[str, tuple[float, float, int]]:
    """Per-metric (mean, population std, contributing episode count); metrics
    absent from every episode are omitted."""
    if not episodes:
        raise ValueError("no episodes to aggregate")
    out: dict[str, tuple[float, float, int]] = {}
    for name, extract in METRIC_FIELDS.items():
        values = [v for m in episodes if (v := extract(m)) is not None]
        if not values:
            continue
        arr = np.asarray(values)
        out[name] = (float(arr.mean()), float(arr.std()), len(values))
    return out
