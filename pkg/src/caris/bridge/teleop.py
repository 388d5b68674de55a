"""Keyboard-style teleop commands and their mapping onto velocity limits."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from caris.geometry import TwistCommand


class TeleopCommand(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    ROTATE_LEFT = "rotate_left"
    ROTATE_RIGHT = "rotate_right"
    STOP = "stop"


@dataclass(frozen=True)
class TeleopLimits:
    max_linear: float = 0.3   # m/s
    max_angular: float = 0.5  # rad/s

    def __post_init__(self):
        if self.max_linear <= 0 or self.max_angular <= 0:
            raise ValueError("speed limits must be positive")


def teleop_to_twist(command: TeleopCommand, scale: float, limits: TeleopLimits) -> TwistCommand:
    """Map a discrete command and a [0, 1] scale onto a bounded twist."""
    if command is TeleopCommand.STOP:
        return TwistCommand(0.0, 0.0)
    if not 0.0 <= scale <= 1.0:
        raise ValueError("scale must be within [0, 1]")
    if command is TeleopCommand.FORWARD:
        return TwistCommand(limits.max_linear * scale, 0.0)
    if command is TeleopCommand.BACKWARD:
        return TwistCommand(-limits.max_linear * scale, 0.0)
    if command is TeleopCommand.ROTATE_LEFT:
        return TwistCommand(0.0, limits.max_angular * scale)
    if command is TeleopCommand.ROTATE_RIGHT:
        return TwistCommand(0.0, -limits.max_angular * scale)
    raise ValueError(f"unhandled command: {command}")
