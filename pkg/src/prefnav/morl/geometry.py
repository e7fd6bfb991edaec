"""2D geometry for the navigation simulator: angle wrapping, distances to
circles and axis-aligned boxes, vectorized ray casting, point-in-polygon."""

from __future__ import annotations

import math

import numpy as np


def wrap_angle(theta: float) -> float:
    """Wrap into (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def circle_surface_distance(px: float, py: float, cx: float, cy: float, radius: float) -> float:
    """Signed distance from a point to a circle surface (negative inside)."""
    return math.hypot(px - cx, py - cy) - radius


def box_surface_distance(px: float, py: float, xmin: float, ymin: float,
                         xmax: float, ymax: float) -> float:
    """Distance from a point to an axis-aligned box (0 inside)."""
    dx = max(xmin - px, 0.0, px - xmax)
    dy = max(ymin - py, 0.0, py - ymax)
    return math.hypot(dx, dy)


def ray_wall_distances(ox: float, oy: float, dirs: np.ndarray,
                       width: float, height: float) -> np.ndarray:
    """Distance along each ray direction to the arena boundary, from inside."""
    dx = dirs[:, 0]
    dy = dirs[:, 1]
    with np.errstate(divide="ignore"):
        tx = np.where(dx > 0, (width - ox) / dx, np.where(dx < 0, -ox / dx, np.inf))
        ty = np.where(dy > 0, (height - oy) / dy, np.where(dy < 0, -oy / dy, np.inf))
    return np.minimum(tx, ty)


def ray_circle_distances(ox: float, oy: float, dirs: np.ndarray,
                         circles: np.ndarray) -> np.ndarray:
    """Per-ray distance to the nearest of the given circles (inf when missed).

    ``dirs`` is (R, 2) unit vectors; ``circles`` is (N, 3) rows (cx, cy, r).
    """
    if circles.shape[0] == 0:
        return np.full(dirs.shape[0], np.inf)
    rel = circles[:, :2] - np.array([ox, oy])  # (N, 2)
    b = dirs @ rel.T  # (R, N) projection of center onto each ray
    c = (rel**2).sum(axis=1) - circles[:, 2] ** 2  # (N,)
    disc = b**2 - c[None, :]
    hit = disc >= 0.0
    sqrt_disc = np.sqrt(np.where(hit, disc, 0.0))
    t = b - sqrt_disc
    t = np.where(hit & (t >= 0.0), t, np.inf)
    return t.min(axis=1)


def ray_box_distances(ox: float, oy: float, dirs: np.ndarray,
                      boxes: np.ndarray) -> np.ndarray:
    """Per-ray distance to the nearest of the given boxes (inf when missed).

    ``boxes`` is (N, 4) rows (xmin, ymin, xmax, ymax); origins outside boxes.
    """
    if boxes.shape[0] == 0:
        return np.full(dirs.shape[0], np.inf)
    # Nudge axis-parallel components off zero so the slab division never
    # produces 0 * inf; the induced error is a miss beyond ~1e12 m.
    safe = np.where(np.abs(dirs) < 1e-12, 1e-12, dirs)
    inv = 1.0 / safe
    t1 = (boxes[None, :, 0:3:2] - ox) * inv[:, None, 0:1]  # x slabs (R, N, 2)
    t2 = (boxes[None, :, 1:4:2] - oy) * inv[:, None, 1:2]  # y slabs
    tmin = np.maximum(np.minimum(t1[..., 0], t1[..., 1]), np.minimum(t2[..., 0], t2[..., 1]))
    tmax = np.minimum(np.maximum(t1[..., 0], t1[..., 1]), np.maximum(t2[..., 0], t2[..., 1]))
    hit = (tmax >= np.maximum(tmin, 0.0)) & (tmin >= 0.0)
    t = np.where(hit, tmin, np.inf)
    return t.min(axis=1)


def cast_rays(ox: float, oy: float, dirs: np.ndarray, width: float, height: float,
              circles: np.ndarray, boxes: np.ndarray) -> np.ndarray:
    """Minimum hit distance per ray over the arena walls plus all circle and
    box obstacles."""
    t = ray_wall_distances(ox, oy, dirs, width, height)
    if circles.shape[0]:
        t = np.minimum(t, ray_circle_distances(ox, oy, dirs, circles))
    if boxes.shape[0]:
        t = np.minimum(t, ray_box_distances(ox, oy, dirs, boxes))
    return t


def point_in_polygon(px: float, py: float, polygon) -> bool:
    """Even-odd crossing test; points on an edge count as inside for the
    horizontal boundaries this simulator uses."""
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) / (y2 - y1) * (x2 - x1)
            if px < x_cross:
                inside = not inside
        elif y1 == py == y2 and min(x1, x2) <= px <= max(x1, x2):
            return True
    return inside
