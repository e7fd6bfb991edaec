"""Discrete-time unicycle navigation environment with a six-component
vector reward.

Reward components, in order:

0. goal progress: change in goal distance per step at full speed, plus a
   +1.0 bonus on the step that enters the goal disc
1. collision: -1.0 on contact (terminal), else a graded penalty within a
   0.3 m safety margin of the nearest surface
2. efficiency: wasted motion, -(distance traveled minus goal progress),
   normalized to [-1, 0]; moving straight at the goal costs nothing
3. obstacle spacing: 0 beyond 2 m of the nearest obstacle surface, falling
   quadratically to -0.5 at contact distance; walls and humans excluded
4. human spacing: the same quadratic shape against the nearest human
   surface, but with a 3 m horizon and twice the scale (to -1.0); 0 when
   the scenario has no humans
5. velocity: -(v / v_max)^2, so half speed costs a quarter of the penalty

Distances in components 3 and 4 are measured from the robot center to the
other body's surface.  The spacing components are penalty-only: rewarding
distance beyond the cap would pay a policy to hover far from everything
instead of finishing the episode.

Step order: the robot translates along its old heading, then rotates;
humans advance; time advances; rewards and termination are evaluated at
the new state.  Termination precedence is collision over goal over
timeout.  The goal bonus in component 0 is a state function and is paid
whenever the goal disc is entered, even on a colliding step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import cast_rays, wrap_angle
from .world import GOAL_RADIUS_M, ROBOT_RADIUS_M, Scenario, World

DT_S = 0.1
V_MAX = 0.5
EPISODE_HORIZON_S = 60.0
MAX_STEPS = int(round(EPISODE_HORIZON_S / DT_S))
SAFETY_MARGIN_M = 0.3
SPACING_CAP_M = 2.0
HUMAN_CAP_M = 3.0
RANGE_CAP_M = 4.0
N_RAYS = 16
GAMMA = 0.95

SPEEDS = (0.0, 0.125, 0.25, 0.375, 0.5)
TURN_RATES = (-1.0, -0.5, 0.0, 0.5, 1.0)
N_ACTIONS = len(SPEEDS) * len(TURN_RATES)

REWARD_COMPONENTS = ("goal", "collision", "efficiency", "obstacle_spacing",
                     "human_spacing", "velocity")

_RAY_OFFSETS = np.arange(N_RAYS) * (2.0 * math.pi / N_RAYS)
_BASE_DIRS = np.column_stack((np.cos(_RAY_OFFSETS), np.sin(_RAY_OFFSETS)))


class Outcome(Enum):
    ONGOING = "ongoing"
    GOAL_REACHED = "goal_reached"
    COLLISION = "collision"
    TIMEOUT = "timeout"

    @property
    def terminal(self) -> bool:
        return self is not Outcome.ONGOING


class SimulationError(RuntimeError):
    """An internal consistency check failed (reward bounds, episode misuse)."""


@dataclass(frozen=True)
class Observation:
    """Robot-frame sensor snapshot. Bearings lie in (-pi, pi]; ranges are
    capped at 4 m and strictly positive."""

    goal_distance: float
    goal_bearing: float
    ranges: np.ndarray
    human_distance: float
    human_bearing: float
    speed: float

    def as_array(self) -> np.ndarray:
        out = np.empty(5 + N_RAYS)
        out[0] = self.goal_distance
        out[1] = self.goal_bearing
        out[2:2 + N_RAYS] = self.ranges
        out[2 + N_RAYS] = self.human_distance
        out[3 + N_RAYS] = self.human_bearing
        out[4 + N_RAYS] = self.speed
        return out


def action_velocity(action: int) -> tuple[float, float]:
    """Map an action index onto (linear speed, turn rate)."""
    if not isinstance(action, (int, np.integer)) or isinstance(action, bool):
        raise SimulationError(f"action must be an integer, got {action!r}")
    if not 0 <= action < N_ACTIONS:
        raise SimulationError(f"action {action} outside [0, {N_ACTIONS})")
    return SPEEDS[action // len(TURN_RATES)], TURN_RATES[action % len(TURN_RATES)]


class NavEnv:
    """One scenario instance; call ``reset`` then ``step`` until terminal."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.world: World | None = None
        self.x = 0.0
        self.y = 0.0
        self.theta = 0.0
        self.speed = 0.0
        self.steps = 0
        self.outcome = Outcome.ONGOING

    @property
    def elapsed_s(self) -> float:
        return self.steps * DT_S

    def reset(self, rng: np.random.Generator | None = None) -> Observation:
        """Start a fresh episode. With an rng, start/goal/human placement is
        jittered (reproducibly); without one the scenario is used verbatim."""
        self.world = World.build(self.scenario, rng)
        self.x, self.y, self.theta = self.world.start
        self.theta = wrap_angle(self.theta)
        self.speed = 0.0
        self.steps = 0
        self.outcome = Outcome.ONGOING
        return self.observe()

    def step(self, action: int) -> tuple[Observation, np.ndarray, Outcome]:
        if self.world is None:
            raise SimulationError("call reset() before step()")
        if self.outcome.terminal:
            raise SimulationError("episode already terminal; call reset()")
        v, omega = action_velocity(action)
        world = self.world
        gx, gy = world.goal

        d_before = math.hypot(gx - self.x, gy - self.y)
        self.x += v * math.cos(self.theta) * DT_S
        self.y += v * math.sin(self.theta) * DT_S
        self.theta = wrap_angle(self.theta + omega * DT_S)
        world.advance_humans(DT_S)
        self.steps += 1
        self.speed = v

        d_after = math.hypot(gx - self.x, gy - self.y)
        wall = world.wall_clearance(self.x, self.y)
        obst = world.obstacle_surface_distance(self.x, self.y)
        human = world.human_surface_distance(self.x, self.y)
        clearance = min(wall, obst, human) - ROBOT_RADIUS_M
        contact = clearance <= 0.0
        goal_hit = d_after < GOAL_RADIUS_M

        r_goal = (d_before - d_after) / (V_MAX * DT_S)
        if goal_hit:
            r_goal += 1.0
        if contact:
            r_coll = -1.0
        else:
            r_coll = -0.25 * max(0.0, 1.0 - clearance / SAFETY_MARGIN_M)
        # Efficiency is wasted motion: distance traveled that did not become
        # progress toward the goal.  Straight pursuit costs nothing, so the
        # weight shapes how tightly detours are cut without dragging speed.
        r_effic = -max(0.0, v * DT_S - (d_before - d_after)) / (2.0 * V_MAX * DT_S)
        # Spacing penalties are quadratic in the shortfall below the cap so
        # the preferred berth grows smoothly with the preference weight.
        # Personal space has a longer horizon and twice the scale of object
        # clearance.
        r_odist = -0.5 * ((SPACING_CAP_M - min(obst, SPACING_CAP_M)) / SPACING_CAP_M) ** 2
        r_hdist = -((HUMAN_CAP_M - min(human, HUMAN_CAP_M)) / HUMAN_CAP_M) ** 2
        r_vel = -((v / V_MAX) ** 2)

        if contact:
            self.outcome = Outcome.COLLISION
        elif goal_hit:
            self.outcome = Outcome.GOAL_REACHED
        elif self.steps >= MAX_STEPS:
            self.outcome = Outcome.TIMEOUT

        reward = np.array([r_goal, r_coll, r_effic, r_odist, r_hdist, r_vel])
        self._check_bounds(reward)
        return self.observe(), reward, self.outcome

    def observe(self) -> Observation:
        world = self.world
        gx, gy = world.goal
        goal_distance = math.hypot(gx - self.x, gy - self.y)
        goal_bearing = wrap_angle(math.atan2(gy - self.y, gx - self.x) - self.theta)

        # Rays at heading + fixed offsets: rotate the precomputed unit circle
        # rather than re-evaluating 2 * N_RAYS trig calls per step.
        c, s = math.cos(self.theta), math.sin(self.theta)
        dirs = _BASE_DIRS @ np.array(((c, s), (-s, c)))
        t = cast_rays(self.x, self.y, dirs, world.width, world.height,
                      world.circles, world.boxes)
        ranges = np.minimum(np.maximum(t, 1e-9), RANGE_CAP_M)

        human_distance = RANGE_CAP_M
        human_bearing = 0.0
        best = math.inf
        for h in world.humans:
            d = math.hypot(h.x - self.x, h.y - self.y)
            if d < best:
                best = d
                human_distance = min(max(d - h.radius, 1e-9), RANGE_CAP_M)
                human_bearing = wrap_angle(
                    math.atan2(h.y - self.y, h.x - self.x) - self.theta
                )
        return Observation(
            goal_distance=goal_distance,
            goal_bearing=goal_bearing,
            ranges=ranges,
            human_distance=human_distance,
            human_bearing=human_bearing,
            speed=self.speed,
        )

    @staticmethod
    def _check_bounds(reward: np.ndarray) -> None:
        r_goal, r_coll, r_effic, r_odist, r_hdist, r_vel = reward
        ok = (
            -1.0 - 1e-9 <= r_goal <= 2.0 + 1e-9
            and -1.0 <= r_coll <= 0.0
            and -1.0 - 1e-9 <= r_effic <= 0.0
            and -0.5 <= r_odist <= 0.0
            and -1.0 <= r_hdist <= 0.0
            and -1.0 <= r_vel <= 0.0
            and np.isfinite(reward).all()
        )
        if not ok:
            raise SimulationError(f"reward outside contract bounds: {reward}")
