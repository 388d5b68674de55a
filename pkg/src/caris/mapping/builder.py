"""Incremental map construction from odometry and scan streams.

The builder trusts reported odometry when available and falls back to
integrating commanded twists. A single consumer feeds it; renders read a
version-stamped snapshot.
"""

from __future__ import annotations

from caris.geometry import LaserScan, Pose2D, TwistCommand
from caris.mapping.grid import GridParams, OccupancyGrid, update_grid
from caris.mapping.odometry import integrate_odometry
from caris.mapping.render import render_map


class MapBuilder:
    def __init__(
        self,
        width_m: float = 20.0,
        height_m: float = 20.0,
        origin: Pose2D = Pose2D(-10.0, -10.0, 0.0),
        params: GridParams | None = None,
    ):
        params = params or GridParams()
        cells_w = int(round(width_m / params.resolution))
        cells_h = int(round(height_m / params.resolution))
        self.grid = OccupancyGrid(cells_w, cells_h, origin, params)
        self.pose = Pose2D(0.0, 0.0, 0.0)
        self.version = 0
        self._have_odometry = False

    def on_odometry(self, pose: Pose2D) -> None:
        self.pose = pose
        self._have_odometry = True

    def on_command(self, twist: TwistCommand, dt: float) -> None:
        """Dead-reckon only while no odometry source is reporting."""
        if not self._have_odometry:
            self.pose = integrate_odometry(self.pose, twist, dt)

    def on_scan(self, scan: LaserScan) -> None:
        if self.grid.in_bounds(*self.grid.world_to_cell(self.pose.x, self.pose.y)):
            update_grid(self.grid, self.pose, scan)
            self.version += 1

    def render_png(self) -> bytes:
        return render_map(self.grid)
