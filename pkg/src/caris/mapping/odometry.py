"""Dead-reckoning pose integration (shared unicycle formula, no collisions)."""

from __future__ import annotations

from caris.geometry import Pose2D, TwistCommand, advance_pose


def integrate_odometry(pose: Pose2D, twist: TwistCommand, dt: float) -> Pose2D:
    """Advance the pose estimate by one commanded-twist interval."""
    return advance_pose(pose, twist, dt)
