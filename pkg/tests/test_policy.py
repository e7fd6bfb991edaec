import json

import numpy as np
import pytest

from prefnav.morl.features import FeatureMap
from prefnav.morl.policy import FORMAT, LinearQPolicy, PolicyFormatError
from prefnav.morl.sim import N_ACTIONS, NavEnv
from prefnav.morl.world import load_scenario

NEUTRAL = np.array([0.5, 0.5, 0.5, 0.5])


@pytest.fixture()
def obs():
    env = NavEnv(load_scenario("home"))
    return env.reset()


def test_fresh_policy_ties_resolve_to_action_zero(obs):
    policy = LinearQPolicy()
    assert np.all(policy.q_values(obs, NEUTRAL) == 0.0)
    assert policy.act(obs, NEUTRAL) == 0


def test_q_values_sum_active_weights(obs):
    policy = LinearQPolicy()
    tiles = policy.features.active_tiles(obs, NEUTRAL)
    policy.W[7, tiles[0]] = 1.5
    policy.W[7, tiles[1]] = 0.25
    policy.W[3, tiles[2]] = 4.0
    q = policy.q_values(obs, NEUTRAL)
    assert q[7] == pytest.approx(1.75)
    assert q[3] == pytest.approx(4.0)
    assert policy.act(obs, NEUTRAL) == 3


def test_epsilon_greedy_explores_and_exploits(obs):
    policy = LinearQPolicy()
    tiles = policy.features.active_tiles(obs, NEUTRAL)
    policy.W[9, tiles] = 1.0
    rng = np.random.default_rng(0)
    greedy = [policy.act_epsilon(obs, NEUTRAL, 0.0, rng) for _ in range(20)]
    assert set(greedy) == {9}
    explore = [policy.act_epsilon(obs, NEUTRAL, 1.0, rng) for _ in range(300)]
    assert len(set(explore)) > 10
    assert all(0 <= a < N_ACTIONS for a in explore)


def test_save_load_roundtrip(tmp_path, obs):
    rng = np.random.default_rng(5)
    fm = FeatureMap()
    W = rng.normal(size=(N_ACTIONS, fm.n_tiles))
    policy = LinearQPolicy(fm, W, metadata={"seed": 5, "episodes": 10})
    path = tmp_path / "policy.npz"
    policy.save(path)
    loaded = LinearQPolicy.load(path)
    assert np.array_equal(loaded.W, policy.W)
    assert loaded.metadata == {"seed": 5, "episodes": 10}
    assert loaded.checksum() == policy.checksum()
    assert loaded.act(obs, NEUTRAL) == policy.act(obs, NEUTRAL)


def test_checksum_tracks_weights():
    fm = FeatureMap()
    a = LinearQPolicy(fm)
    b = LinearQPolicy(fm)
    assert a.checksum() == b.checksum()
    b.W[0, 0] = 1e-9
    assert a.checksum() != b.checksum()


def test_load_rejects_wrong_format(tmp_path):
    path = tmp_path / "bad.npz"
    header = {"format": "prefnav-policy-v999", "features": FeatureMap().config(),
              "metadata": {}}
    with open(path, "wb") as fh:
        np.savez(fh, weights=np.zeros((N_ACTIONS, FeatureMap().n_tiles)),
                 header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8))
    with pytest.raises(PolicyFormatError, match="prefnav-policy-v999"):
        LinearQPolicy.load(path)


def test_load_rejects_feature_mismatch(tmp_path):
    fm = FeatureMap()
    cfg = fm.config()
    cfg["groups"][0][1] += 1  # claim a different tiling geometry
    header = {"format": FORMAT, "features": cfg, "metadata": {}}
    path = tmp_path / "bad.npz"
    with open(path, "wb") as fh:
        np.savez(fh, weights=np.zeros((N_ACTIONS, fm.n_tiles)),
                 header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8))
    with pytest.raises(PolicyFormatError, match="feature geometry"):
        LinearQPolicy.load(path)


def test_load_rejects_non_policy_npz(tmp_path):
    path = tmp_path / "junk.npz"
    np.savez(path, stuff=np.arange(3))
    with pytest.raises(PolicyFormatError, match="not a policy file"):
        LinearQPolicy.load(path)


def test_weight_shape_checked():
    with pytest.raises(PolicyFormatError):
        LinearQPolicy(weights=np.zeros((N_ACTIONS, 3)))
