"""Rectangular world with axis-aligned obstacles, loadable from JSON."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from caris.geometry import Pose2D

Rect = tuple[float, float, float, float]  # xmin, ymin, xmax, ymax


@dataclass(frozen=True)
class World:
    width: float
    height: float
    obstacles: tuple[Rect, ...] = field(default_factory=tuple)
    spawn: Pose2D = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("world dimensions must be positive")
        obstacles = tuple(tuple(float(v) for v in r) for r in self.obstacles)
        for xmin, ymin, xmax, ymax in obstacles:
            if xmin >= xmax or ymin >= ymax:
                raise ValueError("obstacle rectangle has non-positive extent")
            if xmin < 0 or ymin < 0 or xmax > self.width or ymax > self.height:
                raise ValueError("obstacle outside world bounds")
        object.__setattr__(self, "obstacles", obstacles)
        spawn = self.spawn or Pose2D(self.width / 2.0, self.height / 2.0, 0.0)
        object.__setattr__(self, "spawn", spawn)
        if not self.inside(spawn.x, spawn.y) or self.in_obstacle(spawn.x, spawn.y):
            raise ValueError("spawn point is outside the free interior")

    def inside(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.width and 0.0 <= y <= self.height

    def in_obstacle(self, x: float, y: float) -> bool:
        return any(xmin <= x <= xmax and ymin <= y <= ymax for xmin, ymin, xmax, ymax in self.obstacles)

    def segment_blocked(self, x0: float, y0: float, x1: float, y1: float) -> bool:
        """True when the motion segment leaves the world or crosses an obstacle."""
        if not self.inside(x1, y1):
            return True
        for rect in self.obstacles:
            if _segment_intersects_rect(x0, y0, x1, y1, rect):
                return True
        return False

    def raycast(self, x: float, y: float, angle: float) -> float:
        """Distance from (x, y) along `angle` to the nearest wall or obstacle."""
        dx, dy = math.cos(angle), math.sin(angle)
        best = _ray_box_exit(x, y, dx, dy, (0.0, 0.0, self.width, self.height))
        for rect in self.obstacles:
            t = _ray_box_entry(x, y, dx, dy, rect)
            if t is not None and t < best:
                best = t
        return best


def _slab_interval(p: float, d: float, lo: float, hi: float) -> tuple[float, float] | None:
    if d == 0.0:
        return (-math.inf, math.inf) if lo <= p <= hi else None
    t1, t2 = (lo - p) / d, (hi - p) / d
    return (t1, t2) if t1 <= t2 else (t2, t1)


def _ray_box_entry(x: float, y: float, dx: float, dy: float, rect: Rect) -> float | None:
    """Entry distance of a ray into a box, or None if it misses."""
    ix = _slab_interval(x, dx, rect[0], rect[2])
    iy = _slab_interval(y, dy, rect[1], rect[3])
    if ix is None or iy is None:
        return None
    tmin = max(ix[0], iy[0])
    tmax = min(ix[1], iy[1])
    if tmax < max(tmin, 0.0):
        return None
    return max(tmin, 0.0)


def _ray_box_exit(x: float, y: float, dx: float, dy: float, rect: Rect) -> float:
    """Exit distance of a ray cast from inside a box."""
    ix = _slab_interval(x, dx, rect[0], rect[2])
    iy = _slab_interval(y, dy, rect[1], rect[3])
    assert ix is not None and iy is not None, "ray origin outside world"
    return min(ix[1], iy[1])


def _segment_intersects_rect(x0, y0, x1, y1, rect: Rect) -> bool:
    dx, dy = x1 - x0, y1 - y0
    if dx == 0.0 and dy == 0.0:
        return rect[0] <= x0 <= rect[2] and rect[1] <= y0 <= rect[3]
    ix = _slab_interval(x0, dx, rect[0], rect[2])
    iy = _slab_interval(y0, dy, rect[1], rect[3])
    if ix is None or iy is None:
        return False
    tmin = max(ix[0], iy[0], 0.0)
    tmax = min(ix[1], iy[1], 1.0)
    return tmin <= tmax


def world_to_dict(world: World) -> dict:
    return {
        "width": world.width,
        "height": world.height,
        "obstacles": [list(r) for r in world.obstacles],
        "spawn": {"x": world.spawn.x, "y": world.spawn.y, "theta": world.spawn.theta},
    }


def world_from_dict(obj: dict) -> World:
    spawn = None
    if "spawn" in obj:
        s = obj["spawn"]
        spawn = Pose2D(float(s["x"]), float(s["y"]), float(s.get("theta", 0.0)))
    return World(
        width=float(obj["width"]),
        height=float(obj["height"]),
        obstacles=tuple(tuple(r) for r in obj.get("obstacles", [])),
        spawn=spawn,
    )


def load_world(path: str | Path) -> World:
    with open(path, "r", encoding="utf-8") as f:
        return world_from_dict(json.load(f))
