"""A five-state deterministic chain with vector rewards, small enough to
solve exactly.

Layout: from the start cell the robot can pass close to a person, take a
detour cell, or wait.  Both moving actions make the same goal progress, so
any behavioral difference is purely a preference trade:

  state 0 (start) --approach--> 1 (beside person) --approach/detour--> 3 (goal)
                  --detour---->  2 (clear aisle)   --approach/detour--> 3 (goal)
                  --wait------>  0                 1 --wait--> 4 (bumps hazard)

Rewards are six-vectors in the simulator's component order.  ``approach``
variants are fast and close to things; ``detour`` variants are slow and
clear.  ``value_iteration`` gives the exact Q table for any scalarization
weights, which the TD trainer must reproduce.
"""

from __future__ import annotations

import itertools

import numpy as np

from .sim import GAMMA, Outcome

N_STATES = 5
N_ACTIONS = 3
ACTIONS = ("approach", "detour", "wait")
START_STATES = (0, 1, 2)
TERMINAL_STATES = (3, 4)

# transitions[s, a] -> next state
TRANSITIONS = np.array([
    [1, 2, 0],
    [3, 3, 4],
    [3, 3, 2],
    [3, 3, 3],
    [4, 4, 4],
])

# rewards[s, a] -> (goal, collision, efficiency, obstacle, human, velocity)
REWARDS = np.array([
    [[0.5, 0.0, -0.1, -0.3, -0.5, -0.8],
     [0.5, 0.0, -0.1, 0.0, 0.0, -0.2],
     [0.0, 0.0, -0.1, 0.0, 0.0, 0.0]],
    [[1.5, 0.0, -0.1, 0.0, -0.5, -0.8],
     [1.5, 0.0, -0.1, 0.0, -0.3, -0.2],
     [0.0, -1.0, -0.1, 0.0, -0.5, 0.0]],
    [[1.5, 0.0, -0.1, -0.2, -0.4, -0.8],
     [1.5, 0.0, -0.1, 0.0, 0.0, -0.2],
     [0.0, 0.0, -0.1, 0.0, 0.0, 0.0]],
    [[0.0] * 6] * 3,
    [[0.0] * 6] * 3,
])


class ToyMDP:
    """Environment wrapper matching the TD trainer's protocol; observations
    are the raw state index."""

    def __init__(self):
        self.state = 0
        self.done = False

    def reset(self, rng: np.random.Generator) -> int:
        self.state = int(START_STATES[rng.integers(len(START_STATES))])
        self.done = False
        return self.state

    def step(self, action: int) -> tuple[int, np.ndarray, Outcome]:
        if self.done:
            raise RuntimeError("episode already terminal; call reset()")
        if not 0 <= action < N_ACTIONS:
            raise ValueError(f"action {action} outside [0, {N_ACTIONS})")
        reward = REWARDS[self.state, action]
        self.state = int(TRANSITIONS[self.state, action])
        if self.state in TERMINAL_STATES:
            self.done = True
            outcome = Outcome.COLLISION if self.state == 4 else Outcome.GOAL_REACHED
        else:
            outcome = Outcome.ONGOING
        return self.state, reward, outcome


def tabular_features(state: int, lam) -> np.ndarray:
    """One tile per state; the preference enters only through the scalarized
    reward, exactly as in value iteration."""
    return np.array([state], dtype=np.intp)


def value_iteration(weights, gamma: float = GAMMA, tol: float = 1e-13,
                    max_iter: int = 100000) -> np.ndarray:
    """Exact Q table under linearly scalarized rewards; terminal rows are 0."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (6,):
        raise ValueError("weights must have 6 components")
    r = REWARDS @ w  # (N_STATES, N_ACTIONS)
    terminal = np.zeros(N_STATES, dtype=bool)
    terminal[list(TERMINAL_STATES)] = True
    q = np.zeros((N_STATES, N_ACTIONS))
    for _ in range(max_iter):
        v = np.where(terminal, 0.0, q.max(axis=1))
        q_next = r + gamma * v[TRANSITIONS]
        q_next[terminal] = 0.0
        if np.abs(q_next - q).max() <= tol:
            return q_next
        q = q_next
    raise RuntimeError("value iteration failed to converge")


def corner_preferences() -> list[np.ndarray]:
    """All 16 preference vectors with components in {0, 1}."""
    return [np.array(bits, dtype=float) for bits in itertools.product((0.0, 1.0), repeat=4)]
