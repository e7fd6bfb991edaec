#!/usr/bin/env python3
"""Regenerate the bundled cassettes from the bundled fixtures.

The recorded responses stand in for a remote model: context predictions are
the fixture truths with a few deliberate imperfections (one missed object,
one wrong room label) so the evaluation report exercises its partial-credit
paths, and rule-update responses mirror what the constrained grammar derives
from each sentence.  Timestamps are pinned so reruns are byte-identical.

Usage: python3 scripts/record_cassettes.py
"""

from __future__ import annotations

import copy
import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from prefnav.context import context_from_dict, context_to_dict  # noqa: E402
from prefnav.grammar import parse_preference  # noqa: E402
from prefnav.rules import _condition_from_hints  # noqa: E402
from prefnav.gateway.backends import Cassette, load_prompt_template, request_key  # noqa: E402

RECORDED_AT = "2026-08-14T00:00:00+00:00"
DATA = REPO / "src" / "prefnav" / "data"

_LEVEL_NAMES = {0.1: "low", 0.5: "medium", 0.9: "high"}

# Deliberate prediction flaws, keyed by fixture name.
DROP_OBJECTS = {"dining-room-china": ["china cabinet"]}
RENAME_ROOM = {"hallway-plant": "corridor"}


def _entry(cassette: Cassette, role: str, prompt: str, schema_version: str, response) -> None:
    key = request_key(role, prompt, schema_version)
    cassette.entries[key] = {
        "key": key,
        "request": {"role": role, "prompt": prompt, "schema_version": schema_version},
        "response": response,
        "recorded_at": RECORDED_AT,
    }


def record_context_cassette() -> Path:
    template = load_prompt_template("context-prediction")
    fixtures = json.loads(
        (DATA / "fixtures" / "context" / "scene_suite.json").read_text(encoding="utf-8")
    )
    path = DATA / "cassettes" / "context.json"
    cassette = Cassette.fresh(path)
    for fixture in fixtures:
        prompt = template.render({"scene_description": fixture["scene_description"]})
        response = copy.deepcopy(fixture["truth"])
        name = fixture["name"]
        if name in DROP_OBJECTS:
            response["objects"] = [
                o for o in response["objects"] if o["label"] not in DROP_OBJECTS[name]
            ]
        if name in RENAME_ROOM:
            response["room_type"] = RENAME_ROOM[name]
        context_from_dict(response)  # refuse to record schema-invalid entries
        _entry(cassette, "context-prediction", prompt, template.schema_version, response)
    cassette.save()
    return path


def record_rule_update_cassette() -> Path:
    template = load_prompt_template("rule-update")
    fixtures = json.loads(
        (DATA / "fixtures" / "translator" / "anchor_suite.json").read_text(encoding="utf-8")
    )
    path = DATA / "cassettes" / "rule_update.json"
    cassette = Cassette.fresh(path)
    for fixture in fixtures:
        context = context_from_dict(fixture["context"])
        context_json = json.dumps(context_to_dict(context), ensure_ascii=False)
        for sentence in fixture["transcript"]:
            prompt = template.render({"feedback": sentence, "context": context_json})
            parsed = parse_preference(sentence)
            condition = _condition_from_hints(parsed.condition, context)
            response = {
                "effects": [
                    {"objective": d.objective.value, "level": _LEVEL_NAMES[float(d.level.value)]}
                    for d in parsed.effects
                ],
                "condition": condition.to_dict(),
            }
            _entry(cassette, "rule-update", prompt, template.schema_version, response)
    cassette.save()
    return path


def main() -> int:
    for path in (record_context_cassette(), record_rule_update_cassette()):
        entries = json.loads(path.read_text(encoding="utf-8"))
        print(f"{path.relative_to(REPO)}: {len(entries)} entries")
    return 0


if __name__ == "__main__":
    sys.exit(main())
