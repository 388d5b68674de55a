"""Fixed-step differential-drive simulation with 2D lidar raycasting.

The engine is pure and deterministic: identical world, command schedule,
and dt produce an identical state trajectory and scan stream. Wall-clock
pacing lives in the server, never here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from caris.geometry import LaserScan, Pose2D, TwistCommand, unicycle_step
from caris.sim.world import World


@dataclass(frozen=True)
class ScanParams:
    n_beams: int = 360
    angle_min: float = -math.pi
    range_max: float = 8.0

    @property
    def angle_increment(self) -> float:
        return 2.0 * math.pi / self.n_beams

    @property
    def angle_max(self) -> float:
        return self.angle_min + (self.n_beams - 1) * self.angle_increment


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.05               # seconds per step
    command_timeout: float = 0.5   # dead-man: zero velocity after this silence
    scan_rate: float = 10.0        # Hz
    odom_rate: float = 20.0        # Hz
    scan: ScanParams = field(default_factory=ScanParams)


@dataclass(frozen=True)
class SimState:
    pose: Pose2D
    commanded: TwistCommand = TwistCommand()
    clock: float = 0.0
    rng_seed: int = 0
    last_command_at: float = -math.inf


def step(state: SimState, world: World, dt: float, command_timeout: float = 0.5) -> SimState:
    """Advance one fixed step; motion is cancelled on collision."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    commanded = state.commanded
    if state.clock - state.last_command_at >= command_timeout:
        commanded = TwistCommand(0.0, 0.0)
    pose = state.pose
    if not commanded.is_zero():
        nx, ny, ntheta = unicycle_step(
            pose.x, pose.y, pose.theta, commanded.linear, commanded.angular, dt
        )
        # Collision test uses the step chord; at sim step sizes the arc
        # sagitta is far below obstacle scale.
        if world.segment_blocked(pose.x, pose.y, nx, ny) or world.in_obstacle(nx, ny):
            commanded = TwistCommand(0.0, 0.0)
        else:
            pose = Pose2D(nx, ny, ntheta)
    return replace(state, pose=pose, commanded=commanded, clock=state.clock + dt)


def raycast_scan(pose: Pose2D, world: World, params: ScanParams) -> LaserScan:
    """Cast the configured fan of beams from the robot frame.

    Beams that would travel past range_max are encoded as range_max + 1
    so the scan survives strict-JSON transport.
    """
    ranges = []
    for i in range(params.n_beams):
        angle = pose.theta + params.angle_min + i * params.angle_increment
        d = world.raycast(pose.x, pose.y, angle)
        ranges.append(d if d <= params.range_max else params.range_max + 1.0)
    return LaserScan(
        angle_min=params.angle_min,
        angle_max=params.angle_max,
        angle_increment=params.angle_increment,
        range_max=params.range_max,
        ranges=tuple(ranges),
    )


class SimEngine:
    """Owns a SimState and advances it on demand."""

    def __init__(self, world: World, config: SimConfig | None = None, seed: int = 0):
        self.world = world
        self.config = config or SimConfig()
        self.state = SimState(pose=world.spawn, rng_seed=seed)

    def set_command(self, twist: TwistCommand) -> None:
        self.state = replace(self.state, commanded=twist, last_command_at=self.state.clock)

    def step(self, dt: float | None = None) -> SimState:
        self.state = step(
            self.state, self.world, dt or self.config.dt, self.config.command_timeout
        )
        return self.state

    def scan(self) -> LaserScan:
        return raycast_scan(self.state.pose, self.world, self.config.scan)
