from caris.mapping.grid import GridParams, OccupancyGrid, traverse_cells, update_grid
from caris.mapping.odometry import integrate_odometry
from caris.mapping.render import render_map
from caris.mapping.builder import MapBuilder

__all__ = [
    "OccupancyGrid",
    "GridParams",
    "traverse_cells",
    "update_grid",
    "integrate_odometry",
    "render_map",
    "MapBuilder",
]
