"""Measure the behavioral acceptance margins of a policy artifact.

Runs the five preference conditions on each bundled scenario (20 seeded
episodes per condition) and prints each criterion with its ratio and the
required threshold, plus the goal/collision floor across all conditions.

    python3 scripts/measure_margins.py [policy.npz]
"""

from __future__ import annotations

import sys
import time

from prefnav.harness.runner import Fixed, run_condition
from prefnav.morl.policy import LinearQPolicy
from prefnav.morl.world import load_scenario
from prefnav.translator import PreferenceVector

CONDITIONS = {
    "base": PreferenceVector(),
    "hdist": PreferenceVector(hdist=0.9),
    "vel": PreferenceVector(velocity=0.9),
    "effic": PreferenceVector(effic=0.9),
    "odist": PreferenceVector(odist=0.9),
}


def mean(report, metric):
    entry = report.metrics.get(metric)
    return entry[0] if entry else float("nan")


def main() -> None:
    path = sys.argv[1] if len(sys.argv) > 1 else "src/prefnav/data/policy/nav-q.npz"
    policy = LinearQPolicy.load(path)
    print(f"policy {path} checksum {policy.checksum()}")

    t0 = time.perf_counter()
    reports = {}
    for scen_name in ("office", "home", "supermarket"):
        scenario = load_scenario(scen_name)
        for cond_name, vec in CONDITIONS.items():
            rep = run_condition(scenario, Fixed(vec), policy, runs=20, seed=0,
                                name=cond_name)
            reports[scen_name, cond_name] = rep
            m = rep.metrics
            print(f"{scen_name:12s} {cond_name:6s} goal={m['goal_rate'][0]:.2f} "
                  f"coll={m['collision_rate'][0]:.2f} v={m['mean_velocity'][0]:.3f} "
                  f"hdist={mean(rep, 'mean_human_distance'):.3f} "
                  f"odist={mean(rep, 'mean_object_distance'):.3f} "
                  f"len={m['trajectory_length'][0]:.2f}")
    print(f"suite wall time {time.perf_counter() - t0:.1f}s")

    def ratio(scen, cond, metric):
        return (mean(reports[scen, cond], metric)
                / mean(reports[scen, "base"], metric))

    ok = True

    r_off = ratio("office", "hdist", "mean_human_distance")
    r_home = ratio("home", "hdist", "mean_human_distance")
    good = r_off >= 1.10 and r_home >= 1.10
    ok &= good
    print(f"(a) hdist ratio office={r_off:.4f} home={r_home:.4f} (need >= 1.10)"
          f" {'PASS' if good else 'FAIL'}")

    r_vel = ratio("office", "vel", "mean_velocity")
    good = r_vel <= 0.60
    ok &= good
    print(f"(b) velocity ratio office={r_vel:.4f} (need <= 0.60)"
          f" {'PASS' if good else 'FAIL'}")

    len_eff = mean(reports["home", "effic"], "trajectory_length")
    len_base = mean(reports["home", "base"], "trajectory_length")
    len_hd = mean(reports["home", "hdist"], "trajectory_length")
    good = len_eff <= len_base and len_eff < len_hd
    ok &= good
    print(f"(c) effic len home={len_eff:.3f} base={len_base:.3f} hdist={len_hd:.3f}"
          f" (need <= base and < hdist) {'PASS' if good else 'FAIL'}")

    r_od = ratio("supermarket", "odist", "mean_object_distance")
    good = r_od >= 1.05
    ok &= good
    print(f"(d) odist ratio supermarket={r_od:.4f} (need >= 1.05)"
          f" {'PASS' if good else 'FAIL'}")

    worst_goal = min(rep.metrics["goal_rate"][0] for rep in reports.values())
    worst_coll = max(rep.metrics["collision_rate"][0] for rep in reports.values())
    good = worst_goal >= 0.90 and worst_coll <= 0.05
    ok &= good
    print(f"(e) worst goal rate {worst_goal:.2f} (>= 0.90), "
          f"worst collision {worst_coll:.2f} (<= 0.05) {'PASS' if good else 'FAIL'}")

    print("ALL PASS" if ok else "SOME FAIL")


if __name__ == "__main__":
    main()
