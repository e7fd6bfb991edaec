"""Structured scene context: representation, canonical JSON wire form, ground-truth
extraction from an annotated world, and the accuracy metrics used to score a
context backend against ground truth."""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

# Canonical room categories; any other non-empty label is kept verbatim as an
# open label (e.g. "office", "supermarket").
ROOM_TYPES = ("Kitchen", "LivingRoom", "DiningRoom", "Bedroom")

_ROOM_ALIASES = {
    "kitchen": "Kitchen",
    "livingroom": "LivingRoom",
    "living room": "LivingRoom",
    "diningroom": "DiningRoom",
    "dining room": "DiningRoom",
    "bedroom": "Bedroom",
    "bed room": "Bedroom",
}

_ROOM_DISPLAY = {
    "Kitchen": "kitchen",
    "LivingRoom": "living room",
    "DiningRoom": "dining room",
    "Bedroom": "bedroom",
}

_SENTENCE_TERMINATORS = ".!?"


class Lighting(Enum):
    BRIGHT = "Bright"
    GENTLE = "Gentle"
    LOW = "Low"


class ContextSchemaError(ValueError):
    """Raised when structured context text violates the schema; ``key`` names the
    offending field (e.g. ``objects[0].distance_m``)."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


def normalize_label(text: str) -> str:
    return re.sub(r"\s+", " ", text.strip().lower())


def canonical_room(label: str) -> str:
    """Map a free-form room label onto a canonical category, else keep it as an
    open label (normalized). Empty labels are rejected."""
    if label in ROOM_TYPES:
        return label
    norm = normalize_label(label)
    if not norm:
        raise ContextSchemaError("room_type", "room label must be non-empty")
    return _ROOM_ALIASES.get(norm, norm)


def room_display_name(room_type: str) -> str:
    return _ROOM_DISPLAY.get(room_type, room_type)


@dataclass(frozen=True)
class DetectedObject:
    label: str
    distance_m: float
    fragile: bool = False

    def __post_init__(self):
        norm = normalize_label(self.label)
        if not norm:
            raise ContextSchemaError("objects[].label", "label must be non-empty")
        object.__setattr__(self, "label", norm)
        object.__setattr__(self, "distance_m", float(self.distance_m))
        if not (self.distance_m >= 0.0):
            raise ContextSchemaError("objects[].distance_m", "distance must be >= 0")


@dataclass(frozen=True)
class SceneContext:
    room_type: str
    lighting: Lighting
    objects: tuple[DetectedObject, ...] = ()
    human_present: bool = False
    scene_description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "room_type", canonical_room(self.room_type))
        if not isinstance(self.lighting, Lighting):
            object.__setattr__(self, "lighting", _parse_lighting(self.lighting))
        object.__setattr__(self, "objects", tuple(self.objects))
        n_term = sum(self.scene_description.count(ch) for ch in _SENTENCE_TERMINATORS)
        if n_term > 2:
            raise ContextSchemaError(
                "scene_description", f"at most 2 sentence terminators allowed, got {n_term}"
            )

    def object_labels(self) -> list[str]:
        return [o.label for o in self.objects]


@dataclass
class ContextMetrics:
    room_accuracy: float
    object_accuracy: float
    mean_inference_time_s: float
    cases: int = 0

    def __post_init__(self):
        for name in ("room_accuracy", "object_accuracy"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.mean_inference_time_s < 0:
            raise ValueError("mean_inference_time_s must be >= 0")


def _parse_lighting(value: Any) -> Lighting:
    if isinstance(value, Lighting):
        return value
    for member in Lighting:
        if value == member.value:
            return member
    raise ContextSchemaError(
        "lighting", f"expected one of {[m.value for m in Lighting]}, got {value!r}"
    )


# --- canonical wire form ----------------------------------------------------
#
# Top-level keys, in order: room_type, lighting, objects, human_present,
# scene_description.  Object keys: label, distance_m, fragile.  Serialization is
# deterministic: fixed key order, floats printed with Python's shortest
# round-trip repr, UTF-8, indent 2, trailing newline.


def context_to_dict(c: SceneContext) -> dict:
    return {
        "room_type": c.room_type,
        "lighting": c.lighting.value,
        "objects": [
            {"label": o.label, "distance_m": o.distance_m, "fragile": o.fragile}
            for o in c.objects
        ],
        "human_present": c.human_present,
        "scene_description": c.scene_description,
    }


def serialize_context(c: SceneContext) -> bytes:
    return (json.dumps(context_to_dict(c), ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def _require(mapping: dict, key: str, path: str) -> Any:
    if key not in mapping:
        raise ContextSchemaError(f"{path}{key}" if path else key, "missing required key")
    return mapping[key]


def context_from_dict(data: Any, path: str = "") -> SceneContext:
    if not isinstance(data, dict):
        raise ContextSchemaError(path or "<root>", "expected an object")
    room = _require(data, "room_type", path)
    if not isinstance(room, str) or not room.strip():
        raise ContextSchemaError(f"{path}room_type", "expected a non-empty string")
    lighting_raw = _require(data, "lighting", path)
    if not isinstance(lighting_raw, str):
        raise ContextSchemaError(f"{path}lighting", "expected a string")
    lighting = _parse_lighting(lighting_raw)
    objects_raw = _require(data, "objects", path)
    if not isinstance(objects_raw, list):
        raise ContextSchemaError(f"{path}objects", "expected an array")
    objects = []
    for i, entry in enumerate(objects_raw):
        opath = f"{path}objects[{i}]."
        if not isinstance(entry, dict):
            raise ContextSchemaError(f"{path}objects[{i}]", "expected an object")
        label = _require(entry, "label", opath)
        if not isinstance(label, str) or not label.strip():
            raise ContextSchemaError(f"{opath}label", "expected a non-empty string")
        dist = _require(entry, "distance_m", opath)
        if not isinstance(dist, (int, float)) or isinstance(dist, bool) or not math.isfinite(dist):
            raise ContextSchemaError(f"{opath}distance_m", "expected a finite number")
        if dist < 0:
            raise ContextSchemaError(f"{opath}distance_m", f"must be >= 0, got {dist}")
        fragile = _require(entry, "fragile", opath)
        if not isinstance(fragile, bool):
            raise ContextSchemaError(f"{opath}fragile", "expected a boolean")
        objects.append(DetectedObject(label=label, distance_m=float(dist), fragile=fragile))
    human = _require(data, "human_present", path)
    if not isinstance(human, bool):
        raise ContextSchemaError(f"{path}human_present", "expected a boolean")
    desc = _require(data, "scene_description", path)
    if not isinstance(desc, str):
        raise ContextSchemaError(f"{path}scene_description", "expected a string")
    return SceneContext(
        room_type=room,
        lighting=lighting,
        objects=tuple(objects),
        human_present=human,
        scene_description=desc,
    )


def parse_context(raw: bytes | str) -> SceneContext:
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ContextSchemaError("<document>", f"invalid JSON: {e}") from e
    return context_from_dict(data)


# --- ground-truth extraction -------------------------------------------------

# Room-scale sensing: presence flags and object lists describe the room the
# robot is in, not just its immediate surroundings, so presence-conditioned
# rules engage as soon as a person shares the room.
DEFAULT_SENSING_RADIUS_M = 8.0


def describe_scene(room_type: str, lighting: Lighting, n_objects: int, human_present: bool) -> str:
    """Fixed one-sentence template used for ground-truth contexts."""
    base = (
        f"A {lighting.value.lower()}-lit {room_display_name(room_type)} "
        f"containing {n_objects} objects"
    )
    if human_present:
        base += ", with a person nearby"
    return base + "."


def extract_context(world, robot_xy: tuple[float, float],
                    sensing_radius_m: float = DEFAULT_SENSING_RADIUS_M) -> SceneContext:
    """Build the ground-truth scene context around ``robot_xy`` from the world's
    scenario annotations (objects, humans, room regions).

    Object distances are Euclidean, center to center.  A world whose regions do
    not cover the robot position is a scenario bug and raises ``ValueError``.
    """
    if sensing_radius_m <= 0:
        raise ValueError("sensing_radius_m must be > 0")
    rx, ry = robot_xy
    region = world.region_at(robot_xy)
    if region is None:
        raise ValueError(f"robot position {robot_xy} lies outside all annotated regions")
    objects = []
    for obs in world.obstacles:
        cx, cy = obs.center()
        d = math.hypot(cx - rx, cy - ry)
        if d <= sensing_radius_m:
            objects.append(DetectedObject(label=obs.label, distance_m=d, fragile=obs.fragile))
    objects.sort(key=lambda o: (o.distance_m, o.label))
    human_present = any(
        math.hypot(h.x - rx, h.y - ry) <= sensing_radius_m for h in world.humans
    )
    return SceneContext(
        room_type=region.room_type,
        lighting=region.lighting,
        objects=tuple(objects),
        human_present=human_present,
        scene_description=describe_scene(
            region.room_type, region.lighting, len(objects), human_present
        ),
    )


# --- scoring ------------------------------------------------------------------


def score_context(pred: SceneContext, truth: SceneContext) -> tuple[bool, float]:
    """Room match plus object recall (multiset label intersection over truth size;
    1.0 for an empty truth object list)."""
    room_match = normalize_label(room_display_name(pred.room_type)) == normalize_label(
        room_display_name(truth.room_type)
    )
    truth_labels = Counter(truth.object_labels())
    if not truth_labels:
        return room_match, 1.0
    pred_labels = Counter(pred.object_labels())
    hit = sum((truth_labels & pred_labels).values())
    return room_match, hit / sum(truth_labels.values())
