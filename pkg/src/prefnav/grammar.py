"""Deterministic constrained grammar for preference sentences.

Converts a single natural-language feedback sentence into objective directives
plus contextual condition hints, with no model in the loop.  The accepted
productions are documented in docs/grammar.md; anything outside them raises
``UnparseablePreference`` so a caller may fall back to a remote backend.

Parsing peels condition clauses ("in the kitchen", "when people are around",
"near the shelves", "here", "in low light") off either end of the sentence,
backtracking if a strip leaves no parseable core, then matches the remaining
core against the distance, speed, and route productions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .rules import EffectDirective, Level, Objective

_FILLER = {"actually", "please", "now", "also", "and", "ok", "okay", "well", "robot", "hey"}
_ARTICLES = {"the", "a", "an", "any", "all", "some", "those", "that", "this", "these", "my", "our"}
_HUMAN_WORDS = {"people", "humans", "human", "person", "persons", "everyone", "anyone", "pedestrians"}

_ROOM_WORDS = {
    "kitchen": "Kitchen",
    "living room": "LivingRoom",
    "livingroom": "LivingRoom",
    "dining room": "DiningRoom",
    "bedroom": "Bedroom",
    "bed room": "Bedroom",
}

_LIGHT_WORDS = {
    "low": "Low", "dim": "Low", "dark": "Low",
    "bright": "Bright", "strong": "Bright",
    "gentle": "Gentle", "soft": "Gentle",
}


class UnparseablePreference(ValueError):
    """No grammar production matches the feedback sentence."""

    def __init__(self, text: str):
        self.text = text
        super().__init__(
            f"cannot parse preference: {text!r}; expected forms include "
            f"'keep far away from <entity>', 'stay close to <entity>', "
            f"'move slowly/faster', 'take the shortest route', optionally with "
            f"'in the <room>', 'when people are around', 'near the <object>', "
            f"'here', or 'in low light'"
        )


class BaselineConflict(ValueError):
    """The sentence asks to relax a non-negotiable baseline objective."""

    def __init__(self, text: str, objective: str):
        self.text = text
        self.objective = objective
        super().__init__(
            f"preference {text!r} conflicts with the baseline objective '{objective}' "
            f"and was rejected"
        )


@dataclass
class ConditionHints:
    """Raw contextual cues from the sentence.  ``room_from_context`` marks a
    deictic room reference ("here", "this room") to be completed from the live
    context at rule-update time; ``human_from_context`` does the same for bare
    pronouns like "them"."""

    room_type: str | None = None
    lighting: str | None = None
    human_present: bool | None = None
    required_objects: tuple[str, ...] = ()
    room_from_context: bool = False
    human_from_context: bool = False


@dataclass
class ParsedPreference:
    effects: tuple[EffectDirective, ...]
    condition: ConditionHints

    def __iter__(self):  # allows: effects, hints = parse_preference(f)
        return iter((self.effects, self.condition))


def _normalize(text: str) -> list[str]:
    text = re.sub(r"[.,!?;:]+", " ", text.lower())
    tokens = text.split()
    while tokens and tokens[0] in _FILLER:
        tokens.pop(0)
    while tokens and tokens[-1] in _FILLER:
        tokens.pop()
    return tokens


def _strip_articles(tokens: list[str]) -> list[str]:
    i = 0
    while i < len(tokens) and tokens[i] in _ARTICLES:
        i += 1
    return tokens[i:]


def _noun_phrase(text: str) -> str:
    return " ".join(_strip_articles(text.split()))


# Condition clauses, tried in order at either end of the segment.  Handlers
# mutate a trial copy of the hints; the strip only survives if the remainder
# still reaches a core production.

def _cond_room(m: re.Match, hints: ConditionHints):
    phrase = m.group("room")
    hints.room_type = _ROOM_WORDS.get(phrase, phrase)


def _cond_here(m: re.Match, hints: ConditionHints):
    hints.room_from_context = True


def _cond_people(m: re.Match, hints: ConditionHints):
    hints.human_present = True


def _cond_nobody(m: re.Match, hints: ConditionHints):
    hints.human_present = False


def _cond_object(m: re.Match, hints: ConditionHints):
    phrase = _noun_phrase(m.group("obj"))
    if phrase and phrase not in hints.required_objects:
        hints.required_objects = hints.required_objects + (phrase,)


def _cond_light(m: re.Match, hints: ConditionHints):
    hints.lighting = _LIGHT_WORDS[m.group("light")]


def _cond_dark(m: re.Match, hints: ConditionHints):
    hints.lighting = "Low"


_ROOM_ALT = "|".join(sorted(_ROOM_WORDS, key=len, reverse=True))
_HUMAN_ALT = "|".join(sorted(_HUMAN_WORDS, key=len, reverse=True))
_LIGHT_ALT = "|".join(sorted(_LIGHT_WORDS, key=len, reverse=True))

_CONDITION_PATTERNS: list[tuple[str, object]] = [
    (rf"(?:when |while )?in (?:the )?(?P<light>{_LIGHT_ALT}) light(?:ing)?", _cond_light),
    (r"(?:when |while )?in the dark", _cond_dark),
    (rf"(?:when |while )?(?:in|inside) (?:the )?(?P<room>{_ROOM_ALT})", _cond_room),
    (r"(?:when |while )?(?:in (?:the )?)?(?:here|this room|this place)", _cond_here),
    (rf"(?:when|while|whenever|if) (?:{_HUMAN_ALT}) (?:are|is) "
     r"(?:around|present|nearby|near|close)", _cond_people),
    (rf"around (?:{_HUMAN_ALT})", _cond_people),
    (r"(?:when|while|if) (?:no one|nobody) is (?:around|present|nearby)", _cond_nobody),
    (r"(?:when|while) alone", _cond_nobody),
    (r"(?:when |while |whenever )?(?:near|next to|beside|around) (?:the )?(?P<obj>[\w ]+)",
     _cond_object),
    (rf"(?:when |while )?(?:in|inside) (?:the )?(?P<room>[\w ]+? room|\w+)", _cond_room),
]

# Suffix form: clause must end the segment and start at a word boundary.
# Prefix form: clause must start the segment and end at a word boundary.
_COMPILED_CONDITIONS = [
    (
        re.compile(r"(?:^|(?<= ))" + pattern + r"$"),
        re.compile(r"^" + pattern + r"(?= |$)"),
        handler,
    )
    for pattern, handler in _CONDITION_PATTERNS
]

_FAR_WORDS = {"far", "further", "farther", "away", "more", "safe", "large", "big", "wide"}
_CLOSE_WORDS = {"close", "closer", "near", "nearer", "less"}
_MID_WORDS = {"moderate", "medium", "normal", "reasonable"}

_CORE_DISTANCE = re.compile(
    r"(?:keep|stay|remain|move|be)?\s*(?:a )?"
    r"(?P<dir>far away|further away|farther away|far|further|farther|away|"
    r"more distance|more|closer|close|nearer|near|less distance|less|"
    r"moderate distance|medium distance|normal distance|reasonable distance|"
    r"safe distance|large distance|big distance|wide distance)"
    r"\s*(?:distance\s*)?(?:from|to|of)\s+(?P<entity>[\w' ]+)$"
)

_CORE_PROXIMITY = re.compile(
    r"(?:keep|stay|remain|be|hover)\s+(?:near|next to|beside)\s+(?P<entity>[\w' ]+)$"
)

_CORE_NEG_DISTANCE = re.compile(
    r"(?:do not|don'?t|never) (?:get|go|come|move|stay)?\s*(?:too )?"
    r"(?:close|closer|near) (?:to )?(?P<entity>[\w' ]+)$"
)

_CORE_SPEED = re.compile(
    r"(?:move|go|drive|walk|travel|proceed)?\s*"
    r"(?:(?P<slow>slow down|slowly|slower|slow)|"
    r"(?P<fast>speed up|hurry up|hurry|fast|faster|quick|quickly)|"
    r"at a (?P<mid>normal|moderate) (?:speed|pace))$"
)

_CORE_NEG_SPEED = re.compile(r"(?:do not|don'?t|never) (?:rush|hurry|speed|race|go fast|move fast)$")

_CORE_ROUTE = re.compile(
    r"(?:take|follow|use|prefer)?\s*(?:the |a )?"
    r"(?:(?P<short>shortest|most direct|direct|quickest|efficient)|"
    r"(?P<long>longest|longer|scenic|indirect)|(?P<mid>balanced|reasonable))"
    r" (?:route|path|way)$"
)

_CORE_IGNORE = re.compile(
    r"(?:you (?:may|can) )?(?:ignore|skip|forget about|disregard) (?:the )?"
    r"(?P<what>obstacles?|collisions?|collision avoidance|obstacle avoidance|"
    r"walls|safety|people|humans|everything|goals?)"
    r"(?: completely| entirely)?$"
)

_CORE_CRASH = re.compile(
    r"(?:you (?:may|can) )?(?:it is |it'?s )?(?:fine|ok|okay)?\s*(?:to )?"
    r"(?:crash|bump|run) into [\w' ]+$"
)


def _distance_level(direction: str) -> Level:
    head = direction.split()[0]
    if head in _FAR_WORDS:
        return Level.HIGH
    if head in _CLOSE_WORDS:
        return Level.LOW
    if head in _MID_WORDS:
        return Level.MEDIUM
    raise AssertionError(direction)


def _entity_effect(entity: str, level: Level, hints: ConditionHints) -> tuple[EffectDirective, ...]:
    """Route a distance directive to the human or obstacle objective based on
    what the entity names.  Non-human entities become required objects of the
    rule condition."""
    phrase = _noun_phrase(entity)
    if phrase in _HUMAN_WORDS:
        if hints.human_present is None:
            hints.human_present = True
        return (EffectDirective(Objective.HDIST, level),)
    if phrase in {"them", "him", "her"}:
        hints.human_from_context = True
        return (EffectDirective(Objective.HDIST, level),)
    if not phrase:
        raise UnparseablePreference(entity)
    if phrase not in hints.required_objects:
        hints.required_objects = hints.required_objects + (phrase,)
    return (EffectDirective(Objective.ODIST, level),)


def _parse_core(text: str, hints: ConditionHints, raw: str) -> tuple[EffectDirective, ...] | None:
    m = _CORE_IGNORE.match(text)
    if m:
        objective = "reach_goal" if "goal" in m.group("what") else "avoid_collisions"
        raise BaselineConflict(raw, objective)
    if _CORE_CRASH.match(text):
        raise BaselineConflict(raw, "avoid_collisions")

    m = _CORE_DISTANCE.match(text)
    if m:
        return _entity_effect(m.group("entity"), _distance_level(m.group("dir")), hints)
    m = _CORE_NEG_DISTANCE.match(text)
    if m:
        return _entity_effect(m.group("entity"), Level.HIGH, hints)
    m = _CORE_PROXIMITY.match(text)
    if m:
        return _entity_effect(m.group("entity"), Level.LOW, hints)

    m = _CORE_SPEED.match(text)
    if m:
        if m.group("slow"):
            return (EffectDirective(Objective.VELOCITY, Level.HIGH),)
        if m.group("fast"):
            return (EffectDirective(Objective.VELOCITY, Level.LOW),)
        return (EffectDirective(Objective.VELOCITY, Level.MEDIUM),)
    if _CORE_NEG_SPEED.match(text):
        return (EffectDirective(Objective.VELOCITY, Level.HIGH),)

    m = _CORE_ROUTE.match(text)
    if m:
        if m.group("short"):
            return (EffectDirective(Objective.EFFIC, Level.HIGH),)
        if m.group("long"):
            return (EffectDirective(Objective.EFFIC, Level.LOW),)
        return (EffectDirective(Objective.EFFIC, Level.MEDIUM),)
    return None


def _attempt(segment: str, hints: ConditionHints, raw: str, depth: int) -> tuple[EffectDirective, ...] | None:
    segment = segment.strip(" ,")
    if not segment:
        return None
    if depth < 3:
        for suffix_re, prefix_re, handler in _COMPILED_CONDITIONS:
            for anchored, is_suffix in ((suffix_re, True), (prefix_re, False)):
                m = anchored.search(segment)
                if not m:
                    continue
                rest = segment[: m.start()] if is_suffix else segment[m.end():]
                if rest.strip(" ,") == segment:
                    continue
                trial = ConditionHints(**vars(hints))
                handler(m, trial)
                sub = _attempt(rest, trial, raw, depth + 1)
                if sub is not None:
                    hints.__dict__.update(vars(trial))
                    return sub
    return _parse_core(segment, hints, raw)


def parse_preference(feedback) -> ParsedPreference:
    """Parse a feedback message (or plain string) against the constrained grammar.

    Raises ``UnparseablePreference`` when nothing matches and ``BaselineConflict``
    when an ignore-the-baseline production matches.
    """
    text = feedback.text if hasattr(feedback, "text") else feedback
    tokens = _normalize(text)
    if not tokens:
        raise UnparseablePreference(text)
    hints = ConditionHints()
    effects = _attempt(" ".join(tokens), hints, text, 0)
    if effects is None:
        raise UnparseablePreference(text)
    return ParsedPreference(effects=effects, condition=hints)
