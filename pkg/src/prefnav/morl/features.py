"""Sparse tile-coded features over (observation, preference) pairs.

Each feature group is a small grid over one or two observation quantities,
replicated a few times with fractional offsets (classic tile coding).  The
preference components that modulate behavior (human spacing, obstacle
spacing) are crossed with the matching geometry so the linear Q function
can trade clearance against progress differently at different preference
levels; the speed and efficiency components enter as plain binned inputs,
which suffices because Q weights are already per action.

Distances to the nearest human and the nearest surface are binned on a
square-root scale: the action value has a cliff just outside contact range,
so the resolution budget goes where the collision decision is made (a few
centimeters at 0.3 m, a coarse half meter out near the 4 m cap).
"""

from __future__ import annotations

import math

import numpy as np

from .sim import N_RAYS, RANGE_CAP_M, Observation

FORMAT_VERSION = "tiles-v2"

_TWO_PI = 2.0 * math.pi

# Ray k points at heading + k * 22.5 deg.  Quadrant sectors, front first.
_RAY_SECTOR = tuple(((k + 2) // 4) % 4 for k in range(N_RAYS))
_SECTOR_NAMES = ("front", "left", "back", "right")


def _bin(x: float, lo: float, hi: float, n: int, shift: float) -> int:
    z = (x - lo) / (hi - lo) * n + shift
    i = int(z)
    if i < 0:
        return 0
    if i >= n:
        return n - 1
    return i


def _wrap_bin(angle: float, n: int, shift: float) -> int:
    z = (angle + math.pi) / _TWO_PI * n + shift
    return int(z) % n


def _dist_u(d: float) -> float:
    """Map a range reading onto [0, 1] with square-root compression."""
    if d <= 0.0:
        return 0.0
    if d >= RANGE_CAP_M:
        return 1.0
    return math.sqrt(d / RANGE_CAP_M)


class FeatureMap:
    """Maps (Observation, lambda[4]) onto a fixed-size set of active tiles."""

    # (name, copies, tiles per copy, active entries per copy) in index order;
    # geometry is fixed per format version, so this table doubles as the
    # compatibility contract.
    GROUPS = (
        ("goal_coarse", 4, 8 * 12, 1),
        ("goal_fine", 2, 6 * 16, 1),
        ("nearest_ray", 4, 8 * 8, 1),
        ("sector_min", 2, 4 * 8, 4),
        ("human", 4, 8 * 12 * 5, 1),
        ("human_range", 2, 10, 1),
        ("obstacle_pref", 3, 8 * 4 * 5, 1),
        ("pref_velocity", 4, 5, 1),
        ("pref_efficiency", 2, 5, 1),
        ("speed", 1, 5, 1),
        ("bias", 1, 1, 1),
    )

    def __init__(self):
        self.n_active = sum(copies * entries for _, copies, _, entries in self.GROUPS)
        bases = {}
        base = 0
        for name, copies, per_copy, _ in self.GROUPS:
            bases[name] = base
            base += copies * per_copy
        self.n_tiles = base
        self._base = bases
        # The preference vector is constant for a whole episode, so its bin
        # indices are memoized; the cache is tiny and reset when it fills.
        self._lam_cache: dict[tuple, tuple] = {}

    def _lam_bins(self, lam) -> tuple:
        key = (float(lam[0]), float(lam[1]), float(lam[2]), float(lam[3]))
        hit = self._lam_cache.get(key)
        if hit is not None:
            return hit
        if len(self._lam_cache) >= 64:
            self._lam_cache.clear()
        l_eff, l_o, l_h, l_v = key
        h_bins = tuple(_bin(l_h, 0.0, 1.0, 5, 2.0 * (c / 4.0)) for c in range(4))
        o_bins = tuple(_bin(l_o, 0.0, 1.0, 5, 2.0 * (c / 3.0)) for c in range(3))
        vel_base = self._base["pref_velocity"]
        vel_tiles = tuple(vel_base + c * 5 + _bin(l_v, 0.0, 1.0, 5, c / 4.0)
                          for c in range(4))
        eff_base = self._base["pref_efficiency"]
        eff_tiles = tuple(eff_base + c * 5 + _bin(l_eff, 0.0, 1.0, 5, c / 2.0)
                          for c in range(2))
        entry = (h_bins, o_bins, vel_tiles, eff_tiles)
        self._lam_cache[key] = entry
        return entry

    def config(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "groups": [list(g) for g in self.GROUPS],
            "n_tiles": self.n_tiles,
        }

    def matches_config(self, config: dict) -> bool:
        return config == self.config()

    def active_tiles(self, obs: Observation, lam) -> np.ndarray:
        out = np.empty(self.n_active, dtype=np.intp)
        k = 0
        gd = obs.goal_distance
        gb = obs.goal_bearing
        ranges = obs.ranges
        h_bins, o_bins, vel_tiles, eff_tiles = self._lam_bins(lam)

        base = self._base["goal_coarse"]
        for c in range(4):
            s = c / 4.0
            i = _bin(gd, 0.0, 12.0, 8, s) * 12 + _wrap_bin(gb, 12, 2.0 * s)
            out[k] = base + c * 96 + i
            k += 1
        base = self._base["goal_fine"]
        for c in range(2):
            s = c / 2.0
            i = _bin(gd, 0.0, 3.0, 6, s) * 16 + _wrap_bin(gb, 16, 2.0 * s)
            out[k] = base + c * 96 + i
            k += 1

        nearest_ray = int(np.argmin(ranges))
        nearest_u = _dist_u(float(ranges[nearest_ray]))
        base = self._base["nearest_ray"]
        for c in range(4):
            s = c / 4.0
            sector8 = ((nearest_ray + 1) // 2) % 8
            i = _bin(nearest_u, 0.0, 1.0, 8, s) * 8 + sector8
            out[k] = base + c * 64 + i
            k += 1

        base = self._base["sector_min"]
        mins = [RANGE_CAP_M] * 4
        for ray in range(N_RAYS):
            sec = _RAY_SECTOR[ray]
            r = float(ranges[ray])
            if r < mins[sec]:
                mins[sec] = r
        for c in range(2):
            s = c / 2.0
            for sec in range(4):
                i = sec * 8 + _bin(_dist_u(mins[sec]), 0.0, 1.0, 8, s)
                out[k] = base + c * 32 + i
                k += 1

        hd_u = _dist_u(obs.human_distance)
        hb = obs.human_bearing
        base = self._base["human"]
        for c in range(4):
            s = c / 4.0
            i = (_bin(hd_u, 0.0, 1.0, 8, s) * 60
                 + _wrap_bin(hb, 12, 3.0 * s) * 5
                 + h_bins[c])
            out[k] = base + c * 480 + i
            k += 1
        base = self._base["human_range"]
        for c in range(2):
            out[k] = base + c * 10 + _bin(hd_u, 0.0, 1.0, 10, c / 2.0)
            k += 1

        base = self._base["obstacle_pref"]
        side = _RAY_SECTOR[nearest_ray]
        for c in range(3):
            s = c / 3.0
            i = (_bin(nearest_u, 0.0, 1.0, 8, s) * 20
                 + side * 5
                 + o_bins[c])
            out[k] = base + c * 160 + i
            k += 1

        for tile in vel_tiles:
            out[k] = tile
            k += 1
        for tile in eff_tiles:
            out[k] = tile
            k += 1

        base = self._base["speed"]
        out[k] = base + _bin(obs.speed, 0.0, 0.5 + 1e-9, 5, 0.0)
        k += 1
        out[k] = self._base["bias"]
        return out
