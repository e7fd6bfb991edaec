"""Condition runner: preference sources, seed pairing, feedback scripts."""

import json
import math

import numpy as np
import pytest

from prefnav.grammar import UnparseablePreference
from prefnav.harness.runner import (
    BASELINE_LAMBDA,
    FeedbackEvent,
    Fixed,
    Pipeline,
    episode_rng,
    load_feedback_script,
    run_condition,
    run_episode,
)
from prefnav.morl.features import FeatureMap
from prefnav.morl.policy import LinearQPolicy
from prefnav.morl.sim import NavEnv, Outcome
from prefnav.morl.world import load_scenario
from prefnav.rules import Feedback, RuleStore, update_rules
from prefnav.translator import NEUTRAL, PreferenceVector
from prefnav.context import SceneContext


@pytest.fixture(scope="module")
def policy():
    # Zero weights: greedy action is always index 0 (stop and turn), which
    # guarantees timeouts without any training cost.
    return LinearQPolicy(FeatureMap())


@pytest.fixture(scope="module")
def office():
    return load_scenario("office")


@pytest.fixture(scope="module")
def supermarket():
    return load_scenario("supermarket")


def test_run_episode_fixed_basics(policy, office):
    env = NavEnv(office)
    lam = PreferenceVector(0.2, 0.4, 0.6, 0.8)
    metrics, trace = run_episode(env, policy, Fixed(lam), np.random.default_rng(0))
    assert metrics.outcome is Outcome.TIMEOUT
    assert metrics.steps == len(trace.positions) - 1
    assert metrics.lambda_used == lam.as_tuple()
    assert all(l == lam.as_tuple() for l in trace.lambdas)
    assert abs(metrics.mean_velocity - metrics.trajectory_length / (metrics.steps * 0.1)) < 1e-9
    # office has a walking human, so the metric is present
    assert metrics.mean_human_distance is not None


def test_run_episode_supermarket_has_fragile_no_humans(policy, supermarket):
    env = NavEnv(supermarket)
    metrics, _ = run_episode(env, policy, Fixed(NEUTRAL), np.random.default_rng(1))
    assert metrics.mean_human_distance is None
    assert metrics.mean_object_distance is not None
    assert metrics.mean_object_distance > 0


def test_pipeline_at_start_sets_lambda(policy, office):
    env = NavEnv(office)
    source = Pipeline(script=(FeedbackEvent(text="keep far away from people"),))
    metrics, trace = run_episode(env, policy, source, np.random.default_rng(2))
    assert trace.lambdas[0] == (0.5, 0.5, 0.9, 0.5)
    assert metrics.lambda_used == (0.5, 0.5, 0.9, 0.5)


def test_pipeline_at_step_switches_mid_episode(policy, office):
    env = NavEnv(office)
    source = Pipeline(script=(FeedbackEvent(text="move slowly", at_step=5),))
    _, trace = run_episode(env, policy, source, np.random.default_rng(3))
    # lambdas[k+1] is the vector used for step k
    assert trace.lambdas[5][3] == 0.5
    assert trace.lambdas[6][3] == 0.9
    assert trace.lambdas[-1][3] == 0.9


def test_pipeline_starting_store_is_not_mutated(policy, office):
    store = RuleStore()
    context = SceneContext(room_type="office", lighting="Bright", human_present=True)
    update_rules(store, Feedback("move slowly"), context)
    n_before = len(store.rules)
    source = Pipeline(
        script=(FeedbackEvent(text="keep far away from people"),), store=store
    )
    env = NavEnv(office)
    run_episode(env, policy, source, np.random.default_rng(4))
    assert len(store.rules) == n_before


def test_rule_memory_without_matching_rules_cannot_change_behavior(policy, office):
    """With default preferences in force, behavior is independent of what
    happens to sit in rule memory."""
    store = RuleStore()
    # a rule for a different room: never matches the office
    context = SceneContext(room_type="Kitchen", lighting="Low", human_present=False)
    update_rules(store, Feedback("in the kitchen move slowly"), context)

    env = NavEnv(office)
    _, trace_empty = run_episode(env, policy, Pipeline(), np.random.default_rng(7))
    _, trace_stored = run_episode(
        env, policy, Pipeline(store=store), np.random.default_rng(7)
    )
    assert trace_empty.lambdas[0] == BASELINE_LAMBDA
    assert trace_stored.lambdas[0] == BASELINE_LAMBDA
    assert trace_empty.positions == trace_stored.positions


def test_unparseable_script_text_fails_fast(policy, office):
    env = NavEnv(office)
    source = Pipeline(script=(FeedbackEvent(text="flurbl the wozzit"),))
    with pytest.raises(UnparseablePreference):
        run_episode(env, policy, source, np.random.default_rng(5))


def test_condition_worlds_pair_across_sources(policy, office):
    base = run_condition(office, Fixed(NEUTRAL), policy, runs=3, seed=9, name="base")
    other = run_condition(
        office, Fixed(PreferenceVector(0.5, 0.5, 0.9, 0.5)), policy, runs=3, seed=9,
        name="hdist",
    )
    for a, b in zip(base.episodes, other.episodes):
        assert a.start == b.start
        assert a.goal == b.goal


def test_condition_report_shape(policy, office):
    report = run_condition(office, Fixed(NEUTRAL), policy, runs=2, seed=1, name="c")
    assert report.name == "c"
    assert report.scenario == "office"
    assert report.runs == 2
    assert report.seed == 1
    assert report.policy_checksum == policy.checksum()
    assert report.baseline_lambda == (0.5, 0.5, 0.5, 0.5)
    assert len(report.episodes) == 2
    assert "goal_rate" in report.metrics
    assert report.metrics["steps"][2] == 2


def test_condition_is_reproducible(policy, office):
    a = run_condition(office, Fixed(NEUTRAL), policy, runs=2, seed=4)
    b = run_condition(office, Fixed(NEUTRAL), policy, runs=2, seed=4)
    assert a.metrics == b.metrics
    c = run_condition(office, Fixed(NEUTRAL), policy, runs=2, seed=5)
    assert c.episodes[0].start != a.episodes[0].start


def test_run_condition_validates_runs(policy, office):
    with pytest.raises(ValueError):
        run_condition(office, Fixed(NEUTRAL), policy, runs=0, seed=0)


def test_episode_rng_streams_differ_by_run(office):
    r0 = episode_rng(office, 0, 0).uniform()
    r1 = episode_rng(office, 0, 1).uniform()
    r0_again = episode_rng(office, 0, 0).uniform()
    assert r0 != r1
    assert r0 == r0_again


# --- feedback script files --------------------------------------------------


def test_load_feedback_script(tmp_path):
    path = tmp_path / "script.json"
    path.write_text(json.dumps([
        {"at_start": True, "text": "keep far away from people"},
        {"at_step": 30, "text": "move slowly"},
    ]))
    events = load_feedback_script(path)
    assert events[0].at_start and events[0].at_step is None
    assert events[1].at_step == 30


@pytest.mark.parametrize("payload, message", [
    ({"not": "a list"}, "expected a JSON array"),
    ([{"at_start": True}], "'text' must be"),
    ([{"text": "move slowly"}], "exactly one of"),
    ([{"at_start": True, "at_step": 2, "text": "x"}], "exactly one of"),
    ([{"at_start": False, "text": "move slowly"}], "'at_start' must be true"),
    ([{"at_step": -1, "text": "move slowly"}], "non-negative"),
    ([{"at_step": True, "text": "move slowly"}], "non-negative"),
    ([{"at_step": 1.5, "text": "move slowly"}], "non-negative"),
    (["move slowly"], "expected an object"),
])
def test_feedback_script_validation(tmp_path, payload, message):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(ValueError, match=message):
        load_feedback_script(path)
