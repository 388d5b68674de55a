"""Planar geometry vocabulary shared by the bridge, simulator, and mapper."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# Below this angular rate the unicycle update degenerates to a straight line.
OMEGA_EPSILON = 1e-9


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    t = math.fmod(theta, 2.0 * math.pi)
    if t > math.pi:
        t -= 2.0 * math.pi
    elif t <= -math.pi:
        t += 2.0 * math.pi
    return t


@dataclass(frozen=True)
class Pose2D:
    """Planar pose; theta is stored normalized to (-pi, pi]."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError("pose components must be finite")
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class TwistCommand:
    """Velocity command: linear along heading (m/s), angular CCW-positive (rad/s)."""

    linear: float = 0.0
    angular: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.linear) and math.isfinite(self.angular)):
            raise ValueError("twist components must be finite")

    def is_zero(self) -> bool:
        return self.linear == 0.0 and self.angular == 0.0


@dataclass(frozen=True)
class LaserScan:
    """Planar range scan. A range > range_max (or non-finite) means "no return"."""

    angle_min: float
    angle_max: float
    angle_increment: float
    range_max: float
    ranges: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.angle_increment <= 0:
            raise ValueError("angle_increment must be positive")
        expected = math.floor((self.angle_max - self.angle_min) / self.angle_increment + 1e-9) + 1
        if len(self.ranges) != expected:
            raise ValueError(f"expected {expected} ranges, got {len(self.ranges)}")
        object.__setattr__(self, "ranges", tuple(float(r) for r in self.ranges))

    def beam_angle(self, i: int) -> float:
        """Angle of beam i in the sensor frame."""
        return self.angle_min + i * self.angle_increment

    def is_return(self, i: int) -> bool:
        r = self.ranges[i]
        return math.isfinite(r) and r <= self.range_max


def unicycle_step(
    x: float, y: float, theta: float, v: float, omega: float, dt: float
) -> tuple[float, float, float]:
    """Advance a unicycle pose by dt under constant (v, omega).

    Uses the exact arc solution; falls back to a straight segment when
    |omega| is below OMEGA_EPSILON. Returned theta is normalized.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if abs(omega) < OMEGA_EPSILON:
        nx = x + v * math.cos(theta) * dt
        ny = y + v * math.sin(theta) * dt
        ntheta = theta
    else:
        ntheta = theta + omega * dt
        r = v / omega
        nx = x + r * (math.sin(ntheta) - math.sin(theta))
        ny = y - r * (math.cos(ntheta) - math.cos(theta))
    return nx, ny, normalize_angle(ntheta)


def advance_pose(pose: Pose2D, twist: TwistCommand, dt: float) -> Pose2D:
    """`unicycle_step` over the shared pose/twist types."""
    x, y, theta = unicycle_step(pose.x, pose.y, pose.theta, twist.linear, twist.angular, dt)
    return Pose2D(x, y, theta)
