"""Evaluation harness: episode metrics, condition runners, fixture
evaluations, and report emission."""

from .metrics import (
    METRIC_FIELDS,
    EpisodeMetrics,
    EpisodeTrace,
    aggregate,
    fragile_surface_distance,
    metrics_from_trace,
)
from .runner import (
    BASELINE_LAMBDA,
    ConditionReport,
    FeedbackEvent,
    Fixed,
    Pipeline,
    episode_rng,
    load_feedback_script,
    run_condition,
    run_episode,
)
from .report import CSV_COLUMNS, REPORT_FORMATS, emit_report
from .evals import (
    ContextEvalReport,
    ContextFixture,
    TranslatorEvalReport,
    TranslatorFixture,
    eval_context,
    eval_translator,
    load_context_fixtures,
    load_translator_fixtures,
)

__all__ = [
    "BASELINE_LAMBDA",
    "CSV_COLUMNS",
    "ConditionReport",
    "ContextEvalReport",
    "ContextFixture",
    "EpisodeMetrics",
    "EpisodeTrace",
    "FeedbackEvent",
    "Fixed",
    "METRIC_FIELDS",
    "Pipeline",
    "REPORT_FORMATS",
    "TranslatorEvalReport",
    "TranslatorFixture",
    "aggregate",
    "emit_report",
    "episode_rng",
    "eval_context",
    "eval_translator",
    "fragile_surface_distance",
    "load_context_fixtures",
    "load_feedback_script",
    "load_translator_fixtures",
    "metrics_from_trace",
    "run_condition",
    "run_episode",
]
