"""Build the bundled navigation policy artifact.

The mix oversamples the two scenarios with a walking human (office, home)
relative to the open supermarket: the hard part of the task is choosing a
berth around a patrolling human, and the round-robin trainer gives each
list entry an equal share of episodes.

Run from the repository root:

    python3 scripts/train_policy.py --out src/prefnav/data/policy/nav-q.npz

The run is single-threaded and reproducible bit for bit from the seed.
Budget: fits inside 20 minutes on one desktop core.
"""

from __future__ import annotations

import argparse
import time

from prefnav.morl.train import TrainConfig, train_policy
from prefnav.morl.world import load_scenario

TRAIN_MIX = ("office", "home", "supermarket", "office", "home")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="src/prefnav/data/policy/nav-q.npz")
    ap.add_argument("--episodes", type=int, default=38000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    scenarios = [load_scenario(name) for name in TRAIN_MIX]
    config = TrainConfig(
        episodes=args.episodes,
        alpha=0.15,
        epsilon_start=1.0,
        epsilon_end=0.05,
        epsilon_decay_frac=0.3,
        seed=args.seed,
    )

    t0 = time.perf_counter()

    def report(episode, stats):
        if episode % 5000 == 0:
            rate = stats.steps / max(1e-9, time.perf_counter() - t0)
            print(f"episode {episode}/{config.episodes}  steps={stats.steps}"
                  f"  outcomes={dict(stats.outcomes)}  {rate:.0f} steps/s",
                  flush=True)

    policy, stats = train_policy(scenarios, config, progress=report)
    policy.save(args.out)
    print(f"saved {args.out}")
    print(f"checksum {policy.checksum()}")
    print(f"episodes {stats.episodes}  steps {stats.steps}"
          f"  wall {stats.wall_time_s:.1f}s")
    print(f"outcomes {dict(stats.outcomes)}")


if __name__ == "__main__":
    main()
