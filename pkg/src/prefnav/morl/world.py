"""Static world geometry, scenario files, and the humans that move through
them.

A scenario file is JSON with the arena size, annotated room regions
(polygon, room type, lighting), labeled obstacles (circles or axis-aligned
boxes, optionally fragile), humans (a fixed position or a waypoint loop with
a walking speed), the robot start pose, the goal point, and a base seed.
``World.build`` instantiates a scenario with small seeded jitter so that
repeated episodes differ while staying reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..context import Lighting, canonical_room
from .geometry import box_surface_distance, point_in_polygon

HUMAN_RADIUS_M = 0.3
ROBOT_RADIUS_M = 0.25
GOAL_RADIUS_M = 0.3

_JITTER_XY = 0.3
_JITTER_THETA = 0.3


class ScenarioError(ValueError):
    """Raised for a malformed scenario file; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass(frozen=True)
class CircleObstacle:
    cx: float
    cy: float
    radius: float
    label: str
    fragile: bool = False

    def center(self) -> tuple[float, float]:
        return (self.cx, self.cy)


@dataclass(frozen=True)
class BoxObstacle:
    xmin: float
    ymin: float
    xmax: float
    ymax: float
    label: str
    fragile: bool = False

    def center(self) -> tuple[float, float]:
        return ((self.xmin + self.xmax) / 2.0, (self.ymin + self.ymax) / 2.0)


@dataclass(frozen=True)
class Region:
    polygon: tuple[tuple[float, float], ...]
    room_type: str
    lighting: Lighting

    def contains(self, xy: tuple[float, float]) -> bool:
        return point_in_polygon(xy[0], xy[1], self.polygon)


@dataclass
class Human:
    """A walking (or standing) human, modeled as a disc.

    With waypoints the human traverses the closed loop through them at
    ``speed``; otherwise it stands still.
    """

    x: float
    y: float
    speed: float = 0.0
    waypoints: tuple[tuple[float, float], ...] = ()
    radius: float = HUMAN_RADIUS_M
    _target: int = field(default=0, repr=False)

    def advance(self, dt: float) -> None:
        if self.speed <= 0.0 or len(self.waypoints) < 2:
            return
        budget = self.speed * dt
        # Consume the travel budget segment by segment so waypoint corners
        # do not stall or overshoot.
        for _ in range(len(self.waypoints) + 1):
            tx, ty = self.waypoints[self._target]
            dist = math.hypot(tx - self.x, ty - self.y)
            if dist > budget:
                self.x += (tx - self.x) / dist * budget
                self.y += (ty - self.y) / dist * budget
                return
            self.x, self.y = tx, ty
            budget -= dist
            self._target = (self._target + 1) % len(self.waypoints)
        # Budget exceeds the whole loop (absurd speed); stay at last waypoint.


@dataclass(frozen=True)
class Scenario:
    name: str
    width: float
    height: float
    regions: tuple[Region, ...]
    obstacles: tuple
    humans: tuple[Human, ...]
    start: tuple[float, float, float]
    goal: tuple[float, float]
    seed: int = 0


# --- scenario file parsing ------------------------------------------------


def _require(data: dict, key: str, path: str):
    if key not in data:
        raise ScenarioError(f"{path}{key}", "missing required key")
    return data[key]


def _number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(key, "expected a number")
    out = float(value)
    if not math.isfinite(out):
        raise ScenarioError(key, "expected a finite number")
    return out


def _point(value, key: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ScenarioError(key, "expected [x, y]")
    return (_number(value[0], f"{key}[0]"), _number(value[1], f"{key}[1]"))


def _parse_region(data: dict, path: str) -> Region:
    poly_raw = _require(data, "polygon", path)
    if not isinstance(poly_raw, list) or len(poly_raw) < 3:
        raise ScenarioError(f"{path}polygon", "expected at least 3 vertices")
    polygon = tuple(_point(v, f"{path}polygon[{i}]") for i, v in enumerate(poly_raw))
    room = canonical_room(str(_require(data, "room_type", path)))
    lighting_raw = _require(data, "lighting", path)
    try:
        lighting = Lighting(lighting_raw)
    except ValueError:
        raise ScenarioError(f"{path}lighting", f"unknown lighting {lighting_raw!r}") from None
    return Region(polygon=polygon, room_type=room, lighting=lighting)


def _parse_obstacle(data: dict, path: str):
    shape = _require(data, "shape", path)
    label = str(_require(data, "label", path))
    fragile = data.get("fragile", False)
    if not isinstance(fragile, bool):
        raise ScenarioError(f"{path}fragile", "expected a boolean")
    if shape == "circle":
        return CircleObstacle(
            cx=_number(_require(data, "x", path), f"{path}x"),
            cy=_number(_require(data, "y", path), f"{path}y"),
            radius=_number(_require(data, "radius", path), f"{path}radius"),
            label=label,
            fragile=fragile,
        )
    if shape == "box":
        x = _number(_require(data, "x", path), f"{path}x")
        y = _number(_require(data, "y", path), f"{path}y")
        w = _number(_require(data, "width", path), f"{path}width")
        h = _number(_require(data, "height", path), f"{path}height")
        if w <= 0 or h <= 0:
            raise ScenarioError(f"{path}width", "box sides must be positive")
        return BoxObstacle(xmin=x, ymin=y, xmax=x + w, ymax=y + h,
                           label=label, fragile=fragile)
    raise ScenarioError(f"{path}shape", f"unknown shape {shape!r}")


def _parse_human(data: dict, path: str) -> Human:
    waypoints_raw = data.get("waypoints")
    speed = _number(data.get("speed", 0.0), f"{path}speed")
    if speed < 0:
        raise ScenarioError(f"{path}speed", "speed must be >= 0")
    if waypoints_raw is not None:
        if not isinstance(waypoints_raw, list) or len(waypoints_raw) < 2:
            raise ScenarioError(f"{path}waypoints", "expected at least 2 waypoints")
        waypoints = tuple(
            _point(v, f"{path}waypoints[{i}]") for i, v in enumerate(waypoints_raw)
        )
        if "x" in data or "y" in data:
            x = _number(data["x"], f"{path}x")
            y = _number(data["y"], f"{path}y")
        else:
            x, y = waypoints[0]
        return Human(x=x, y=y, speed=speed, waypoints=waypoints)
    return Human(
        x=_number(_require(data, "x", path), f"{path}x"),
        y=_number(_require(data, "y", path), f"{path}y"),
        speed=0.0,
    )


def parse_scenario(data: dict, name: str = "scenario") -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("$", "scenario file must hold a JSON object")
    arena = _require(data, "arena", "")
    if not isinstance(arena, dict):
        raise ScenarioError("arena", "expected an object")
    width = _number(_require(arena, "width", "arena."), "arena.width")
    height = _number(_require(arena, "height", "arena."), "arena.height")
    if width <= 0 or height <= 0:
        raise ScenarioError("arena", "arena sides must be positive")

    regions_raw = _require(data, "regions", "")
    if not isinstance(regions_raw, list) or not regions_raw:
        raise ScenarioError("regions", "expected a non-empty list")
    regions = tuple(
        _parse_region(r, f"regions[{i}].") for i, r in enumerate(regions_raw)
    )

    obstacles = tuple(
        _parse_obstacle(o, f"obstacles[{i}].")
        for i, o in enumerate(data.get("obstacles", []))
    )
    humans = tuple(
        _parse_human(h, f"humans[{i}].") for i, h in enumerate(data.get("humans", []))
    )

    start_raw = _require(data, "start", "")
    start = (
        _number(_require(start_raw, "x", "start."), "start.x"),
        _number(_require(start_raw, "y", "start."), "start.y"),
        _number(start_raw.get("theta", 0.0), "start.theta"),
    )
    goal_raw = _require(data, "goal", "")
    goal = (
        _number(_require(goal_raw, "x", "goal."), "goal.x"),
        _number(_require(goal_raw, "y", "goal."), "goal.y"),
    )
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ScenarioError("seed", "expected an integer")

    scenario = Scenario(
        name=str(data.get("name", name)),
        width=width,
        height=height,
        regions=regions,
        obstacles=obstacles,
        humans=humans,
        start=start,
        goal=goal,
        seed=seed,
    )
    for label, (px, py) in (("start", start[:2]), ("goal", goal)):
        if not (0 < px < width and 0 < py < height):
            raise ScenarioError(label, "must lie inside the arena")
    return scenario


def bundled_scenario_names() -> list[str]:
    root = resources.files("prefnav.data.scenarios")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(ref: str | Path) -> Scenario:
    """Load a scenario from a file path or a bundled scenario name."""
    path = Path(ref)
    if path.suffix == ".json" and path.exists():
        data = json.loads(path.read_text(encoding="utf-8"))
        return parse_scenario(data, name=path.stem)
    candidate = resources.files("prefnav.data.scenarios") / f"{ref}.json"
    if candidate.is_file():
        data = json.loads(candidate.read_text(encoding="utf-8"))
        return parse_scenario(data, name=str(ref))
    raise FileNotFoundError(
        f"no scenario file or bundled scenario named {ref!r}"
        f" (bundled: {', '.join(bundled_scenario_names())})"
    )


# --- instantiated world ---------------------------------------------------


class World:
    """One episode's geometry: static obstacles plus mutable humans."""

    def __init__(self, scenario: Scenario, start: tuple[float, float, float],
                 goal: tuple[float, float], humans: list[Human]):
        self.scenario = scenario
        self.width = scenario.width
        self.height = scenario.height
        self.regions = scenario.regions
        self.obstacles = scenario.obstacles
        self.humans = humans
        self.start = start
        self.goal = goal
        circles = [o for o in scenario.obstacles if isinstance(o, CircleObstacle)]
        boxes = [o for o in scenario.obstacles if isinstance(o, BoxObstacle)]
        self.circles = np.array(
            [[o.cx, o.cy, o.radius] for o in circles], dtype=float
        ).reshape(len(circles), 3)
        self.boxes = np.array(
            [[o.xmin, o.ymin, o.xmax, o.ymax] for o in boxes], dtype=float
        ).reshape(len(boxes), 4)

    @classmethod
    def build(cls, scenario: Scenario, rng: np.random.Generator | None = None) -> "World":
        """Instantiate the scenario, jittering start, goal, and human phase
        when an rng is given. Jittered placements keep clear of obstacles."""
        if rng is None:
            humans = [
                Human(h.x, h.y, speed=h.speed, waypoints=h.waypoints)
                for h in scenario.humans
            ]
            return cls(scenario, scenario.start, scenario.goal, humans)

        sx, sy, stheta = scenario.start
        sx, sy = _jitter_point(scenario, rng, sx, sy, clear=ROBOT_RADIUS_M + 0.05)
        stheta = float(stheta + rng.uniform(-_JITTER_THETA, _JITTER_THETA))
        gx, gy = scenario.goal
        gx, gy = _jitter_point(scenario, rng, gx, gy, clear=GOAL_RADIUS_M)

        humans = []
        for h in scenario.humans:
            speed = h.speed * float(rng.uniform(0.8, 1.2)) if h.speed > 0 else 0.0
            if len(h.waypoints) >= 2 and h.speed > 0:
                x, y, target = _loop_phase(h.waypoints, float(rng.uniform(0.0, 1.0)))
                humans.append(
                    Human(x, y, speed=speed, waypoints=h.waypoints, _target=target)
                )
            else:
                x, y = _jitter_point(scenario, rng, h.x, h.y, clear=HUMAN_RADIUS_M)
                humans.append(Human(x, y))
        return cls(scenario, (sx, sy, stheta), (gx, gy), humans)

    def region_at(self, xy: tuple[float, float]):
        for region in self.regions:
            if region.contains(xy):
                return region
        return None

    def advance_humans(self, dt: float) -> None:
        for h in self.humans:
            h.advance(dt)

    def wall_clearance(self, x: float, y: float) -> float:
        return min(x, self.width - x, y, self.height - y)

    def obstacle_surface_distance(self, x: float, y: float) -> float:
        """Distance from a point to the nearest obstacle surface (walls and
        humans excluded); inf when the scenario has no obstacles."""
        best = math.inf
        for row in self.circles:
            best = min(best, math.hypot(x - row[0], y - row[1]) - row[2])
        for row in self.boxes:
            best = min(best, box_surface_distance(x, y, row[0], row[1], row[2], row[3]))
        return best

    def human_surface_distance(self, x: float, y: float) -> float:
        """Distance from a point to the nearest human surface; inf when the
        scenario has no humans."""
        best = math.inf
        for h in self.humans:
            best = min(best, math.hypot(x - h.x, y - h.y) - h.radius)
        return best


def _placement_clear(scenario: Scenario, x: float, y: float, clear: float) -> bool:
    if not (clear < x < scenario.width - clear and clear < y < scenario.height - clear):
        return False
    for o in scenario.obstacles:
        if isinstance(o, CircleObstacle):
            d = math.hypot(x - o.cx, y - o.cy) - o.radius
        else:
            d = box_surface_distance(x, y, o.xmin, o.ymin, o.xmax, o.ymax)
        if d <= clear:
            return False
    return True


def _jitter_point(scenario: Scenario, rng: np.random.Generator,
                  x: float, y: float, clear: float) -> tuple[float, float]:
    for _ in range(20):
        jx = x + float(rng.uniform(-_JITTER_XY, _JITTER_XY))
        jy = y + float(rng.uniform(-_JITTER_XY, _JITTER_XY))
        if _placement_clear(scenario, jx, jy, clear):
            return (jx, jy)
    return (x, y)


def _loop_phase(waypoints: tuple[tuple[float, float], ...],
                phase: float) -> tuple[float, float, int]:
    """Point at ``phase`` (0..1) of the way around the closed waypoint loop,
    plus the index of the waypoint being walked toward."""
    n = len(waypoints)
    lengths = []
    for i in range(n):
        ax, ay = waypoints[i]
        bx, by = waypoints[(i + 1) % n]
        lengths.append(math.hypot(bx - ax, by - ay))
    total = sum(lengths)
    if total <= 0:
        return (waypoints[0][0], waypoints[0][1], 1 % n)
    remaining = phase * total
    for i, seg in enumerate(lengths):
        if remaining <= seg or i == n - 1:
            ax, ay = waypoints[i]
            bx, by = waypoints[(i + 1) % n]
            frac = remaining / seg if seg > 0 else 0.0
            return (ax + (bx - ax) * frac, ay + (by - ay) * frac, (i + 1) % n)
        remaining -= seg
    return (waypoints[0][0], waypoints[0][1], 1 % n)
