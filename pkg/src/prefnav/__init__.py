"""Preference-conditioned navigation: scene context, persistent preference
rules, translation to objective weights, and a multi-objective policy."""

__version__ = "0.1.0"

from .context import DetectedObject, Lighting, SceneContext
from .rules import Feedback, Rule, RuleStore, load_rules, save_rules, update_rules
from .translator import PreferenceVector, TranslationResult, scalarize, translate

__all__ = [
    "DetectedObject",
    "Feedback",
    "Lighting",
    "PreferenceVector",
    "Rule",
    "RuleStore",
    "SceneContext",
    "TranslationResult",
    "load_rules",
    "save_rules",
    "scalarize",
    "translate",
    "update_rules",
    "__version__",
]
