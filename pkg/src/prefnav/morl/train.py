"""One-step Q-learning over scalarized vector rewards.

The trainer is generic over the environment: anything with
``reset(rng) -> obs`` and ``step(action) -> (obs, reward_vector, outcome)``
works, which lets the same update loop drive both the navigation
simulator and the small analytic chain used to validate it against exact
value iteration.

Each episode samples one preference vector, scalarizes rewards with the
corresponding weights, and runs epsilon-greedy TD(0).  Everything is
driven by a single seeded generator, so a (seed, config) pair reproduces
the run bit for bit.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..translator import PreferenceVector
from .features import FeatureMap
from .policy import LinearQPolicy
from .sim import GAMMA, MAX_STEPS, N_ACTIONS, NavEnv
from .world import Scenario


class TrainingDivergence(RuntimeError):
    """Weights went non-finite; carries the episode where it happened."""

    def __init__(self, episode: int, detail: str):
        self.episode = episode
        super().__init__(f"training diverged at episode {episode}: {detail}")


@dataclass
class TrainConfig:
    episodes: int = 20000
    alpha: float = 0.15
    gamma: float = GAMMA
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    # Fraction of episodes over which epsilon anneals linearly.
    epsilon_decay_frac: float = 0.5
    max_steps: int = MAX_STEPS
    seed: int = 0

    def epsilon_at(self, episode: int) -> float:
        horizon = max(1, int(self.episodes * self.epsilon_decay_frac))
        frac = min(1.0, episode / horizon)
        return self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac


@dataclass
class TrainStats:
    episodes: int = 0
    steps: int = 0
    outcomes: Counter = field(default_factory=Counter)
    wall_time_s: float = 0.0


def sample_preference(rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0.0, 1.0, 4)


def td_train(envs, features, n_tiles: int, config: TrainConfig,
             lambda_source=sample_preference, n_actions: int = N_ACTIONS,
             progress=None) -> tuple[np.ndarray, TrainStats]:
    """Q-learning over one or more environments, cycled per episode.

    ``features`` is ``(obs, lam) -> active tile indices``; the step size is
    divided by the number of active tiles so the effective update magnitude
    is independent of the feature geometry.
    """
    if not isinstance(envs, (list, tuple)):
        envs = [envs]
    rng = np.random.default_rng(config.seed)
    W = np.zeros((n_actions, n_tiles))
    stats = TrainStats()
    t0 = time.perf_counter()

    for episode in range(config.episodes):
        env = envs[episode % len(envs)]
        lam = lambda_source(rng)
        weights = np.concatenate(([1.0, 1.0], lam))
        epsilon = config.epsilon_at(episode)
        obs = env.reset(rng)
        tiles = features(obs, lam)
        alpha = config.alpha / len(tiles)

        for _ in range(config.max_steps):
            q = W[:, tiles].sum(axis=1)
            if rng.random() < epsilon:
                action = int(rng.integers(n_actions))
            else:
                action = int(np.argmax(q))
            obs, reward_vec, outcome = env.step(action)
            reward = float(weights @ reward_vec)
            stats.steps += 1
            if outcome.terminal:
                delta = reward - float(q[action])
            else:
                next_tiles = features(obs, lam)
                target = reward + config.gamma * float(W[:, next_tiles].sum(axis=1).max())
                delta = target - float(q[action])
            if not math.isfinite(delta):
                raise TrainingDivergence(episode, f"TD error {delta!r}")
            W[action, tiles] += alpha * delta
            if outcome.terminal:
                stats.outcomes[outcome.value] += 1
                break
            tiles = next_tiles
        else:
            # max_steps guard tripped before the environment called time;
            # only possible when config.max_steps undercuts the horizon.
            stats.outcomes["cutoff"] += 1
        stats.episodes += 1
        if progress is not None and (episode + 1) % 1000 == 0:
            progress(episode + 1, stats)

    stats.wall_time_s = time.perf_counter() - t0
    return W, stats


def train_policy(scenarios: list[Scenario], config: TrainConfig,
                 progress=None) -> tuple[LinearQPolicy, TrainStats]:
    """Train the navigation policy over the given scenarios with one
    preference vector drawn uniformly from [0, 1]^4 per episode."""
    feature_map = FeatureMap()
    envs = [NavEnv(s) for s in scenarios]
    W, stats = td_train(envs, feature_map.active_tiles, feature_map.n_tiles, config,
                        progress=progress)
    metadata = {
        "seed": config.seed,
        "episodes": config.episodes,
        "alpha": config.alpha,
        "gamma": config.gamma,
        "epsilon": [config.epsilon_start, config.epsilon_end, config.epsilon_decay_frac],
        "scenarios": [s.name for s in scenarios],
        "steps": stats.steps,
        "train_seconds": round(stats.wall_time_s, 1),
        "preference": "uniform[0,1]^4 per episode",
    }
    policy = LinearQPolicy(feature_map, W, metadata)
    return policy, stats


def preference_weights(vector: PreferenceVector) -> np.ndarray:
    """Scalarization weights for a preference vector (baselines pinned at 1)."""
    return vector.weights()
