"""Shared generators for property-style tests: random grammar sentences with
known expected effects, and scene contexts satisfying their conditions."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from prefnav.context import DetectedObject, Lighting, SceneContext

OBJECT_POOL = ["glass bottles", "shelves", "vase", "boxes"]
ROOM_POOL = [("kitchen", "Kitchen"), ("living room", "LivingRoom"), ("bedroom", "Bedroom")]

_HDIST = {
    0.9: ["keep far away from people", "stay further away from people",
          "keep more distance from people", "don't get too close to people"],
    0.5: ["keep a moderate distance from people", "keep a normal distance from people"],
    0.1: ["stay close to people", "move closer to people", "stay near people"],
}
_VELOCITY = {
    0.9: ["move slowly", "slow down", "go slower", "don't rush"],
    0.5: ["move at a normal speed"],
    0.1: ["move faster", "speed up", "go quickly"],
}
_EFFIC = {
    0.9: ["take the shortest route", "take the most direct path", "use the quickest way"],
    0.5: ["take a balanced route"],
    0.1: ["take the longest route", "follow the scenic path"],
}


def _odist_phrases(obj: str) -> dict[float, list[str]]:
    return {
        0.9: [f"keep far away from the {obj}", f"stay further away from the {obj}",
              f"don't get too close to the {obj}"],
        0.5: [f"keep a moderate distance from the {obj}"],
        0.1: [f"stay close to the {obj}", f"stay near the {obj}"],
    }


@dataclass
class SampledFeedback:
    text: str
    objective: str
    level: float
    room_type: str | None = None
    lighting: str | None = None
    human_present: bool | None = None
    required_objects: tuple[str, ...] = ()

    def condition_key(self) -> tuple:
        return (self.room_type, self.lighting, self.human_present, self.required_objects)


def sample_feedback(rng: random.Random, condition_richness: float = 0.5) -> SampledFeedback:
    """Draw one sentence with a known parse.  ``condition_richness`` scales how
    often optional condition clauses are attached."""
    objective = rng.choice(["hdist", "odist", "velocity", "effic"])
    level = rng.choice([0.1, 0.5, 0.9])
    case = SampledFeedback(text="", objective=objective, level=level)

    if objective == "hdist":
        core = rng.choice(_HDIST[level])
        case.human_present = True
    elif objective == "odist":
        obj = rng.choice(OBJECT_POOL)
        core = rng.choice(_odist_phrases(obj)[level])
        case.required_objects = (obj,)
    elif objective == "velocity":
        core = rng.choice(_VELOCITY[level])
    else:
        core = rng.choice(_EFFIC[level])

    suffixes = []
    if rng.random() < condition_richness:
        spoken, canonical = rng.choice(ROOM_POOL)
        suffixes.append(f"in the {spoken}")
        case.room_type = canonical
    if rng.random() < condition_richness * 0.6:
        word, value = rng.choice([("low", "Low"), ("bright", "Bright"), ("gentle", "Gentle")])
        suffixes.append(f"in {word} light")
        case.lighting = value
    if objective != "hdist" and rng.random() < condition_richness * 0.6:
        suffixes.append("when people are around")
        case.human_present = True

    rng.shuffle(suffixes)
    case.text = " ".join([core] + suffixes)
    return case


def context_for(case: SampledFeedback, rng: random.Random) -> SceneContext:
    """A context the sampled sentence's condition matches."""
    room = case.room_type or rng.choice(["Kitchen", "office", "LivingRoom"])
    lighting = Lighting(case.lighting) if case.lighting else rng.choice(list(Lighting))
    objects = [DetectedObject(o, round(rng.uniform(0.5, 2.5), 2)) for o in case.required_objects]
    if rng.random() < 0.5:
        objects.append(DetectedObject("chair", round(rng.uniform(0.5, 2.5), 2)))
    human = case.human_present if case.human_present is not None else rng.random() < 0.5
    return SceneContext(
        room_type=room,
        lighting=lighting,
        objects=tuple(objects),
        human_present=human,
        scene_description="A test scene.",
    )
