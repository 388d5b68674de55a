from caris.sim.world import World, load_world
from caris.sim.engine import ScanParams, SimConfig, SimEngine, SimState, raycast_scan, step
from caris.sim.server import SimServer

__all__ = [
    "World",
    "load_world",
    "SimConfig",
    "SimState",
    "SimEngine",
    "ScanParams",
    "step",
    "raycast_scan",
    "SimServer",
]
