"""Log-odds occupancy grid built from lidar scans at known poses."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from caris.geometry import LaserScan, Pose2D


@dataclass(frozen=True)
class GridParams:
    resolution: float = 0.05    # meters per cell
    l_occ: float = 0.85         # log-odds increment for a beam endpoint
    l_free: float = -0.4        # log-odds increment for traversed cells
    l_clamp: float = 10.0       # symmetric clamp bound
    threshold: float = 2.0      # |log-odds| beyond which a cell is classified


class OccupancyGrid:
    """Fixed-size grid; cell (0, 0) sits at `origin`, x grows with column index."""

    def __init__(
        self,
        width: int,
        height: int,
        origin: Pose2D = Pose2D(0.0, 0.0, 0.0),
        params: GridParams | None = None,
    ):
        if width <= 0 or height <= 0:
            raise ValueError("grid dimensions must be positive")
        self.width = int(width)
        self.height = int(height)
        self.origin = origin
        self.params = params or GridParams()
        # row index = cell y, column index = cell x
        self.logodds = np.zeros((self.height, self.width), dtype=np.float64)

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        res = self.params.resolution
        return (
            int(math.floor((x - self.origin.x) / res)),
            int(math.floor((y - self.origin.y) / res)),
        )

    def in_bounds(self, cx: int, cy: int) -> bool:
        return 0 <= cx < self.width and 0 <= cy < self.height

    def value(self, cx: int, cy: int) -> float:
        return float(self.logodds[cy, cx])

    def _add(self, cx: int, cy: int, delta: float) -> None:
        clamp = self.params.l_clamp
        self.logodds[cy, cx] = min(clamp, max(-clamp, self.logodds[cy, cx] + delta))

    def copy(self) -> "OccupancyGrid":
        g = OccupancyGrid(self.width, self.height, self.origin, self.params)
        g.logodds = self.logodds.copy()
        return g

    # --- persistence: flat binary plus a JSON header ---

    def save(self, path: str | Path) -> None:
        path = Path(path)
        self.logodds.astype("<f8").tofile(path.with_suffix(".bin"))
        header = {
            "resolution": self.params.resolution,
            "origin": {"x": self.origin.x, "y": self.origin.y, "theta": self.origin.theta},
            "width": self.width,
            "height": self.height,
            "l_occ": self.params.l_occ,
            "l_free": self.params.l_free,
            "l_clamp": self.params.l_clamp,
            "threshold": self.params.threshold,
            "dtype": "<f8",
        }
        path.with_suffix(".json").write_text(json.dumps(header, indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "OccupancyGrid":
        path = Path(path)
        header = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))
        params = GridParams(
            resolution=header["resolution"],
            l_occ=header["l_occ"],
            l_free=header["l_free"],
            l_clamp=header["l_clamp"],
            threshold=header["threshold"],
        )
        o = header["origin"]
        grid = cls(header["width"], header["height"], Pose2D(o["x"], o["y"], o["theta"]), params)
        data = np.fromfile(path.with_suffix(".bin"), dtype=header["dtype"])
        grid.logodds = data.reshape((grid.height, grid.width)).astype(np.float64)
        return grid


def traverse_cells(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Every cell the segment between the two cell centers passes through.

    Supercover walk: when the segment crosses a lattice corner exactly,
    both side cells are included, matching closed-box intersection.
    """
    cells = [(x0, y0)]
    nx, ny = abs(x1 - x0), abs(y1 - y0)
    sx = 1 if x1 > x0 else -1
    sy = 1 if y1 > y0 else -1
    x, y, ix, iy = x0, y0, 0, 0
    while ix < nx or iy < ny:
        # Compare the next vertical and horizontal boundary crossings:
        # (ix + 1/2) / nx versus (iy + 1/2) / ny, cross-multiplied.
        decision = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx
        if decision == 0:
            cells.append((x + sx, y))
            cells.append((x, y + sy))
            x += sx
            y += sy
            ix += 1
            iy += 1
        elif decision < 0:
            x += sx
            ix += 1
        else:
            y += sy
            iy += 1
        cells.append((x, y))
    return cells


def update_grid(grid: OccupancyGrid, pose: Pose2D, scan: LaserScan) -> OccupancyGrid:
    """Fold one scan into the grid with the standard inverse sensor model.

    Traversed cells get l_free, the endpoint cell of a returned beam gets
    l_occ. Beams with no return mark free space out to range_max. Rays are
    truncated at the grid edge. Mutates and returns `grid`.
    """
    cx0, cy0 = grid.world_to_cell(pose.x, pose.y)
    if not grid.in_bounds(cx0, cy0):
        raise ValueError("robot pose outside grid extent")
    p = grid.params
    for i, r in enumerate(scan.ranges):
        returned = scan.is_return(i)
        dist = r if returned else scan.range_max
        angle = pose.theta + scan.beam_angle(i)
        ex = pose.x + dist * math.cos(angle)
        ey = pose.y + dist * math.sin(angle)
        cx1, cy1 = grid.world_to_cell(ex, ey)
        cells = traverse_cells(cx0, cy0, cx1, cy1)
        # The grid is convex, so once a ray leaves it never re-enters.
        end = len(cells)
        for j, (cx, cy) in enumerate(cells):
            if not grid.in_bounds(cx, cy):
                end = j
                break
        truncated = end < len(cells)
        for cx, cy in cells[: end - 1 if (returned and not truncated) else end]:
            grid._add(cx, cy, p.l_free)
        if returned and not truncated:
            grid._add(cx1, cy1, p.l_occ)
    return grid
