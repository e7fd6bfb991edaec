"""Linear Q function over tile-coded features, with a versioned on-disk
format.

Policies are .npz archives holding the weight matrix plus a JSON header
(format version, feature geometry, training metadata).  Loading rejects a
file whose format or feature geometry does not match the running code, so
a stale artifact fails loudly instead of acting on scrambled features.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .features import FeatureMap
from .sim import N_ACTIONS, Observation

FORMAT = "prefnav-policy-v1"


class PolicyFormatError(ValueError):
    """The policy file does not match the format this code understands."""


class LinearQPolicy:
    def __init__(self, feature_map: FeatureMap | None = None,
                 weights: np.ndarray | None = None,
                 metadata: dict | None = None):
        self.features = feature_map or FeatureMap()
        if weights is None:
            weights = np.zeros((N_ACTIONS, self.features.n_tiles))
        if weights.shape != (N_ACTIONS, self.features.n_tiles):
            raise PolicyFormatError(
                f"weight shape {weights.shape} != ({N_ACTIONS}, {self.features.n_tiles})"
            )
        self.W = weights
        self.metadata = dict(metadata or {})

    def q_values(self, obs: Observation, lam) -> np.ndarray:
        tiles = self.features.active_tiles(obs, lam)
        return self.W[:, tiles].sum(axis=1)

    def act(self, obs: Observation, lam) -> int:
        """Greedy action; ties resolve to the lowest action index."""
        return int(np.argmax(self.q_values(obs, lam)))

    def act_epsilon(self, obs: Observation, lam, epsilon: float,
                    rng: np.random.Generator) -> int:
        if rng.random() < epsilon:
            return int(rng.integers(N_ACTIONS))
        return self.act(obs, lam)

    def checksum(self) -> str:
        digest = hashlib.sha256()
        digest.update(FORMAT.encode())
        digest.update(json.dumps(self.features.config(), sort_keys=True).encode())
        digest.update(np.ascontiguousarray(self.W).tobytes())
        return digest.hexdigest()[:16]

    def save(self, path: str | Path) -> None:
        header = {
            "format": FORMAT,
            "features": self.features.config(),
            "metadata": self.metadata,
        }
        with open(path, "wb") as fh:
            np.savez_compressed(fh, weights=self.W,
                                header=np.frombuffer(
                                    json.dumps(header).encode(), dtype=np.uint8))

    @classmethod
    def load(cls, path: str | Path) -> "LinearQPolicy":
        with np.load(path) as data:
            if "header" not in data or "weights" not in data:
                raise PolicyFormatError(f"{path}: not a policy file")
            header = json.loads(bytes(data["header"]).decode())
            weights = data["weights"]
        if header.get("format") != FORMAT:
            raise PolicyFormatError(
                f"{path}: format {header.get('format')!r}, expected {FORMAT!r}"
            )
        feature_map = FeatureMap()
        if not feature_map.matches_config(header.get("features", {})):
            raise PolicyFormatError(f"{path}: feature geometry does not match this build")
        return cls(feature_map, weights, header.get("metadata"))
