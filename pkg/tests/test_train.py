import numpy as np
import pytest

from prefnav.morl.sim import NavEnv
from prefnav.morl.toymdp import N_STATES, ToyMDP, tabular_features
from prefnav.morl.train import (
    TrainConfig,
    TrainingDivergence,
    sample_preference,
    td_train,
    train_policy,
)
from prefnav.morl.world import load_scenario


def test_epsilon_schedule_endpoints():
    cfg = TrainConfig(episodes=1000, epsilon_start=1.0, epsilon_end=0.05,
                      epsilon_decay_frac=0.5)
    assert cfg.epsilon_at(0) == 1.0
    assert cfg.epsilon_at(500) == pytest.approx(0.05)
    assert cfg.epsilon_at(999) == pytest.approx(0.05)
    assert cfg.epsilon_at(250) == pytest.approx(0.525)


def test_sample_preference_range():
    rng = np.random.default_rng(0)
    draws = np.array([sample_preference(rng) for _ in range(500)])
    assert draws.shape == (500, 4)
    assert draws.min() >= 0.0 and draws.max() <= 1.0
    # All four components actually vary.
    assert np.all(draws.std(axis=0) > 0.2)


def test_training_is_bit_reproducible():
    cfg = TrainConfig(episodes=60, seed=21)
    env_a = NavEnv(load_scenario("home"))
    env_b = NavEnv(load_scenario("home"))
    from prefnav.morl.features import FeatureMap
    fm = FeatureMap()
    W1, s1 = td_train(env_a, fm.active_tiles, fm.n_tiles, cfg)
    W2, s2 = td_train(env_b, fm.active_tiles, fm.n_tiles, cfg)
    assert np.array_equal(W1, W2)
    assert s1.steps == s2.steps
    assert dict(s1.outcomes) == dict(s2.outcomes)
    W3, _ = td_train(NavEnv(load_scenario("home")), fm.active_tiles, fm.n_tiles,
                     TrainConfig(episodes=60, seed=22))
    assert not np.array_equal(W1, W3)


def test_divergence_raises_with_episode_index():
    cfg = TrainConfig(episodes=500, alpha=1e12, epsilon_start=1.0,
                      epsilon_end=1.0, max_steps=50, seed=2)
    with pytest.raises(TrainingDivergence) as err:
        td_train(ToyMDP(), tabular_features, N_STATES, cfg, n_actions=3)
    assert isinstance(err.value.episode, int)
    assert 0 <= err.value.episode < 500


def test_stats_account_for_every_episode():
    cfg = TrainConfig(episodes=40, seed=5, max_steps=80)
    env = NavEnv(load_scenario("office"))
    from prefnav.morl.features import FeatureMap
    fm = FeatureMap()
    _, stats = td_train(env, fm.active_tiles, fm.n_tiles, cfg)
    assert stats.episodes == 40
    assert sum(stats.outcomes.values()) == 40
    assert stats.steps >= 40
    assert stats.wall_time_s > 0


def test_cutoff_counted_when_horizon_is_undercut():
    cfg = TrainConfig(episodes=30, alpha=0.5, max_steps=2, seed=0,
                      epsilon_start=1.0, epsilon_end=1.0)
    _, stats = td_train(ToyMDP(), tabular_features, N_STATES, cfg, n_actions=3)
    assert stats.outcomes["cutoff"] > 0


def test_train_policy_smoke(tmp_path):
    scenarios = [load_scenario("office")]
    policy, stats = train_policy(scenarios, TrainConfig(episodes=25, seed=9))
    assert stats.episodes == 25
    assert policy.metadata["episodes"] == 25
    assert policy.metadata["scenarios"] == ["office"]
    assert np.isfinite(policy.W).all()
    path = tmp_path / "p.npz"
    policy.save(path)
    from prefnav.morl.policy import LinearQPolicy
    loaded = LinearQPolicy.load(path)
    assert loaded.checksum() == policy.checksum()


def test_progress_callback_fires():
    calls = []
    cfg = TrainConfig(episodes=2000, alpha=1.0, epsilon_start=1.0,
                      epsilon_end=1.0, max_steps=30, seed=1)
    td_train(ToyMDP(), tabular_features, N_STATES, cfg, n_actions=3,
             progress=lambda ep, stats: calls.append(ep))
    assert calls == [1000, 2000]
