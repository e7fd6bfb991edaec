"""Fixture-driven evaluation of the preference translator and the context
predictor.

Translator fixtures pair a scene context and a feedback transcript with the
preference vector a correct pipeline should produce.  Context fixtures pair
a scene description with the ground-truth context.  Fixture directories hold
JSON files, each containing one fixture object or an array of them.

A broken fixture (unparseable feedback, backend failure, malformed JSON
payload) is reported per fixture and excluded from the aggregates rather
than aborting the sweep.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from ..context import SceneContext, context_from_dict, score_context
from ..rules import Feedback, RuleStore, update_rules
from ..translator import (
    COMPONENTS,
    EprefReport,
    PreferenceVector,
    preference_error,
    translate,
)

DOMAIN_ALIASES = {"cts": "continuous", "disc": "discrete"}

RuleUpdater = Callable[[RuleStore, str, SceneContext], None]
ContextPredictor = Callable[[str], SceneContext]


@dataclass(frozen=True)
class TranslatorFixture:
    name: str
    context: SceneContext
    transcript: tuple[str, ...]
    truth: PreferenceVector


@dataclass(frozen=True)
class ContextFixture:
    name: str
    scene_description: str
    truth: SceneContext


def _fixture_files(directory: str | Path) -> list[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise ValueError(f"fixture directory not found: {root}")
    files = sorted(root.glob("*.json"))
    if not files:
        raise ValueError(f"no .json fixture files under {root}")
    return files


def _iter_entries(path: Path):
    data = json.loads(path.read_text(encoding="utf-8"))
    entries = data if isinstance(data, list) else [data]
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ValueError(f"{path.name}[{i}]: expected an object")
        yield f"{path.stem}[{i}]", entry


def load_translator_fixtures(directory: str | Path) -> list[TranslatorFixture]:
    fixtures = []
    for path in _fixture_files(directory):
        for fallback_name, entry in _iter_entries(path):
            transcript = entry.get("transcript", [])
            if not isinstance(transcript, list) or not all(isinstance(t, str) for t in transcript):
                raise ValueError(f"{fallback_name}: 'transcript' must be a list of strings")
            fixtures.append(
                TranslatorFixture(
                    name=str(entry.get("name", fallback_name)),
                    context=context_from_dict(entry["context"]),
                    transcript=tuple(transcript),
                    truth=PreferenceVector.from_dict(entry["truth"]),
                )
            )
    if not fixtures:
        raise ValueError(f"no translator fixtures under {directory}")
    return fixtures


def load_context_fixtures(directory: str | Path) -> list[ContextFixture]:
    fixtures = []
    for path in _fixture_files(directory):
        for fallback_name, entry in _iter_entries(path):
            description = entry.get("scene_description")
            if not isinstance(description, str) or not description.strip():
                raise ValueError(f"{fallback_name}: 'scene_description' must be a non-empty string")
            fixtures.append(
                ContextFixture(
                    name=str(entry.get("name", fallback_name)),
                    scene_description=description,
                    truth=context_from_dict(entry["truth"]),
                )
            )
    if not fixtures:
        raise ValueError(f"no context fixtures under {directory}")
    return fixtures


# --- translator evaluation ------------------------------------------------


@dataclass(frozen=True)
class TranslatorCase:
    name: str
    error: str | None
    continuous: PreferenceVector | None
    discrete: PreferenceVector | None
    truth: PreferenceVector

    def abs_errors(self, domain: str) -> tuple[float, ...] | None:
        predicted = self.continuous if domain == "continuous" else self.discrete
        if predicted is None:
            return None
        return tuple(
            float(abs(a - b))
            for a, b in zip(predicted.as_tuple(), self.truth.as_tuple())
        )


@dataclass(frozen=True)
class TranslatorEvalReport:
    cases: tuple[TranslatorCase, ...]
    continuous: EprefReport | None
    discrete: EprefReport | None
    primary_domain: str
    failures: int

    @property
    def primary(self) -> EprefReport | None:
        return self.continuous if self.primary_domain == "continuous" else self.discrete

    def render(self) -> str:
        lines = [f"translator evaluation over {len(self.cases)} fixtures "
                 f"(primary domain: {self.primary_domain})"]
        for case in self.cases:
            if case.error is not None:
                lines.append(f"  {case.name}: ERROR {case.error}")
                continue
            cts = case.abs_errors("continuous")
            disc = case.abs_errors("discrete")
            lines.append(
                f"  {case.name}: cts mean {np.mean(cts):.4f}  disc mean {np.mean(disc):.4f}"
            )
        for label, report in (("continuous", self.continuous), ("discrete", self.discrete)):
            if report is None:
                lines.append(f"  aggregate {label}: no successful fixtures")
                continue
            per = ", ".join(
                f"{name}={value:.4f}" for name, value in zip(COMPONENTS, report.per_component)
            )
            lines.append(f"  aggregate {label}: mean {report.mean:.4f} ({per})")
        if self.failures:
            lines.append(f"  failures: {self.failures}")
        return "\n".join(lines) + "\n"


def _grammar_updater(store: RuleStore, text: str, context: SceneContext) -> None:
    update_rules(store, Feedback(text), context)


def eval_translator(
    fixtures: list[TranslatorFixture],
    updater: RuleUpdater | None = None,
    domain: str = "continuous",
) -> TranslatorEvalReport:
    """Replay each fixture's transcript through the rule updater, translate in
    both domains, and report absolute errors against the fixture's truth."""
    domain = DOMAIN_ALIASES.get(domain, domain)
    if domain not in ("continuous", "discrete"):
        raise ValueError(f"unknown domain {domain!r}; use 'cts' or 'disc'")
    if not fixtures:
        raise ValueError("eval_translator needs at least one fixture")
    apply_feedback = updater or _grammar_updater

    cases: list[TranslatorCase] = []
    for fixture in fixtures:
        store = RuleStore()
        try:
            for text in fixture.transcript:
                apply_feedback(store, text, fixture.context)
            cts = translate(store, fixture.context, domain="continuous").vector
            disc = translate(store, fixture.context, domain="discrete").vector
            cases.append(TranslatorCase(fixture.name, None, cts, disc, fixture.truth))
        except Exception as exc:
            cases.append(TranslatorCase(fixture.name, f"{type(exc).__name__}: {exc}", None, None, fixture.truth))

    ok = [c for c in cases if c.error is None]
    continuous = discrete = None
    if ok:
        continuous = preference_error([c.continuous for c in ok], [c.truth for c in ok])
        discrete = preference_error([c.discrete for c in ok], [c.truth for c in ok])
    return TranslatorEvalReport(
        cases=tuple(cases),
        continuous=continuous,
        discrete=discrete,
        primary_domain=domain,
        failures=len(cases) - len(ok),
    )


# --- context evaluation ---------------------------------------------------


@dataclass(frozen=True)
class ContextCase:
    name: str
    error: str | None
    room_match: bool
    object_recall: float


@dataclass(frozen=True)
class ContextEvalReport:
    cases: tuple[ContextCase, ...]
    room_accuracy: float
    mean_object_recall: float
    failures: int

    def render(self) -> str:
        lines = [f"context evaluation over {len(self.cases)} fixtures"]
        for case in self.cases:
            if case.error is not None:
                lines.append(f"  {case.name}: ERROR {case.error}")
            else:
                lines.append(
                    f"  {case.name}: room {'ok' if case.room_match else 'MISS'}"
                    f"  recall {case.object_recall:.2f}"
                )
        lines.append(
            f"  aggregate: room accuracy {self.room_accuracy:.2f}, "
            f"mean object recall {self.mean_object_recall:.2f}"
        )
        if self.failures:
            lines.append(f"  failures: {self.failures}")
        return "\n".join(lines) + "\n"


def eval_context(
    fixtures: list[ContextFixture],
    predictor: ContextPredictor,
) -> ContextEvalReport:
    """Run the context predictor on each fixture's scene description and score
    the prediction against the ground truth."""
    if not fixtures:
        raise ValueError("eval_context needs at least one fixture")
    cases: list[ContextCase] = []
    for fixture in fixtures:
        try:
            predicted = predictor(fixture.scene_description)
            room_match, recall = score_context(predicted, fixture.truth)
            cases.append(ContextCase(fixture.name, None, room_match, recall))
        except Exception as exc:
            cases.append(ContextCase(fixture.name, f"{type(exc).__name__}: {exc}", False, 0.0))

    ok = [c for c in cases if c.error is None]
    room_accuracy = float(np.mean([c.room_match for c in ok])) if ok else 0.0
    mean_recall = float(np.mean([c.object_recall for c in ok])) if ok else 0.0
    return ContextEvalReport(
        cases=tuple(cases),
        room_accuracy=room_accuracy,
        mean_object_recall=mean_recall,
        failures=len(cases) - len(ok),
    )
