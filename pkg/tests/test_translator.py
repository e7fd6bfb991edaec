"""Preference translation: grid snapping, defaults, explanations, error metric."""

import math
import random

import numpy as np
import pytest

from prefnav.context import DetectedObject, Lighting, SceneContext
from prefnav.rules import RuleStore, update_rules
from prefnav.translator import (
    COMPONENTS,
    PreferenceVector,
    discretize,
    make_ground_truth,
    preference_error,
    scalarize,
    translate,
)

KITCHEN = SceneContext(
    "Kitchen", Lighting.BRIGHT, (DetectedObject("glass bottles", 1.2, True),), True, "x",
)


@pytest.mark.parametrize(
    "value,expected",
    [
        (0.84, 0.8),
        (0.85, 0.9),
        (1.0, 1.0),
        (0.0, 0.0),
        (0.04999, 0.0),
        (0.05, 0.1),
        (0.96, 1.0),
        (1.2, 1.0),
        (-0.3, 0.0),
    ],
)
def test_discretize_rounds_half_up(value, expected):
    assert discretize(value) == expected


def test_discretize_identity_on_grid():
    for i in range(11):
        value = i / 10.0
        assert discretize(value) == value


def test_discretize_rejects_non_finite():
    with pytest.raises(ValueError):
        discretize(float("nan"))


def test_vector_defaults_and_validation():
    vec = PreferenceVector()
    assert vec.as_tuple() == (0.5, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        PreferenceVector(effic=1.2)
    with pytest.raises(ValueError):
        PreferenceVector(hdist=float("nan"))
    with pytest.raises(ValueError):
        PreferenceVector(velocity=True)


def test_vector_dict_round_trip():
    vec = PreferenceVector(0.1, 0.2, 0.9, 0.4)
    assert PreferenceVector.from_dict(vec.to_dict()) == vec
    assert list(vec.to_dict()) == list(COMPONENTS)
    with pytest.raises(ValueError):
        PreferenceVector.from_dict({"effic": 0.5})
    with pytest.raises(ValueError):
        PreferenceVector.from_dict({**vec.to_dict(), "extra": 1.0})


def test_weights_pin_baselines_at_one():
    w = PreferenceVector(0.1, 0.2, 0.3, 0.4).weights()
    assert w.tolist() == [1.0, 1.0, 0.1, 0.2, 0.3, 0.4]


def test_translate_empty_store_is_neutral():
    result = translate(RuleStore(), KITCHEN)
    assert result.vector == PreferenceVector()
    assert result.applied_rules == ()
    assert result.explanation == (
        "effic=0.50 (default); odist=0.50 (default); "
        "hdist=0.50 (default); velocity=0.50 (default)"
    )


def test_translate_reflects_matching_rules():
    store = RuleStore()
    update_rules(store, "keep far away from people", KITCHEN)
    update_rules(store, "move slowly in the kitchen", KITCHEN)
    result = translate(store, KITCHEN)
    assert result.vector == PreferenceVector(hdist=0.9, velocity=0.9)
    assert result.applied_rules == ("r-000001", "r-000002")
    assert "hdist=0.90 (rule r-000001)" in result.explanation
    assert "velocity=0.90 (rule r-000002)" in result.explanation
    assert "effic=0.50 (default)" in result.explanation


def test_translate_ignores_non_matching_rules():
    store = RuleStore()
    update_rules(store, "move slowly in the kitchen", KITCHEN)
    bedroom = SceneContext("Bedroom", Lighting.LOW, (), False, "x")
    result = translate(store, bedroom)
    assert result.vector == PreferenceVector()
    assert result.applied_rules == ()


def test_translate_dedupes_applied_rule_ids():
    store = RuleStore()
    update_rules(store, "keep far away from people", KITCHEN)
    update_rules(store, "slow down", KITCHEN)
    # one more rule whose effects cover two objectives via modify on velocity
    update_rules(store, "move slower", KITCHEN)
    result = translate(store, KITCHEN)
    assert len(result.applied_rules) == len(set(result.applied_rules))


def test_scalarize_matches_manual_dot():
    r = [1.0, -1.0, -0.1, 0.25, -0.5, -0.3]
    w = [1.0, 1.0, 0.9, 0.5, 0.1, 0.0]
    assert scalarize(r, w) == pytest.approx(sum(a * b for a, b in zip(r, w)))


def test_scalarize_shape_mismatch():
    with pytest.raises(ValueError):
        scalarize([1.0, 2.0], [1.0])


def test_scalarize_linearity_spot_check():
    rng = np.random.default_rng(3)
    for _ in range(200):
        r1 = rng.uniform(-2, 2, size=6)
        r2 = rng.uniform(-2, 2, size=6)
        w = rng.uniform(0, 1, size=6)
        a, b = rng.uniform(-3, 3, size=2)
        lhs = scalarize(a * r1 + b * r2, w)
        rhs = a * scalarize(r1, w) + b * scalarize(r2, w)
        assert math.isclose(lhs, rhs, rel_tol=0.0, abs_tol=1e-12)


def test_preference_error_per_component_and_mean():
    pred = [PreferenceVector(0.6, 0.5, 0.9, 0.5), PreferenceVector(0.6, 0.5, 0.5, 0.5)]
    true = [PreferenceVector(0.5, 0.5, 1.0, 0.5), PreferenceVector(0.5, 0.5, 0.5, 0.1)]
    report = preference_error(pred, true)
    assert report.per_component == pytest.approx((0.1, 0.0, 0.05, 0.2))
    assert report.mean == pytest.approx((0.1 + 0.0 + 0.05 + 0.2) / 4)


def test_preference_error_hand_fixture():
    report = preference_error(
        [PreferenceVector(0.6, 0.5, 0.5, 0.5)], [PreferenceVector(0.5, 0.5, 0.5, 0.5)]
    )
    assert report.per_component == pytest.approx((0.1, 0.0, 0.0, 0.0), abs=1e-9)
    assert report.mean == pytest.approx(0.025, abs=1e-9)


def test_preference_error_l2_norm_flag():
    pred = [PreferenceVector(0.5, 0.5, 0.5, 0.5)]
    true = [PreferenceVector(0.5, 0.5, 0.8, 0.9)]
    report = preference_error(pred, true, norm="l2")
    assert report.mean == pytest.approx(0.5)
    assert report.per_component == pytest.approx((0.0, 0.0, 0.3, 0.4))


def test_preference_error_validation():
    vec = PreferenceVector()
    with pytest.raises(ValueError):
        preference_error([vec], [vec, vec])
    with pytest.raises(ValueError):
        preference_error([], [])
    with pytest.raises(ValueError):
        preference_error([vec], [vec], norm="manhattan")


def test_make_ground_truth_anchors():
    assert make_ground_truth("max", "med", "min", "med").as_tuple() == (1.0, 0.5, 0.0, 0.5)
    assert make_ground_truth().as_tuple() == (0.5, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        make_ground_truth(effic="huge")


def test_discrete_domain_snaps_explicit_levels():
    store = RuleStore()
    rule = update_rules(store, "keep far away from people", KITCHEN).rule
    rule.effects["hdist"] = 0.84  # simulates an externally edited store
    assert translate(store, KITCHEN).vector.hdist == 0.84
    assert translate(store, KITCHEN, domain="discrete").vector.hdist == 0.8
    with pytest.raises(ValueError):
        translate(store, KITCHEN, domain="fuzzy")


def test_translation_is_deterministic_across_orderings():
    rng = random.Random(11)
    store = RuleStore()
    sentences = ["keep far away from people", "move slowly in the kitchen", "take the shortest route"]
    rng.shuffle(sentences)
    for s in sentences:
        update_rules(store, s, KITCHEN)
    a = translate(store, KITCHEN)
    b = translate(store, KITCHEN)
    assert a == b
