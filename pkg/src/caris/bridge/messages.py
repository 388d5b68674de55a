"""JSON message envelope for the websocket robot link, plus payload codecs.

The envelope follows the public rosbridge v2.0 protocol: a single JSON
object per frame with an "op" field selecting the operation. Only the
pub/sub subset is implemented; services and binary transports are not.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from caris.errors import InvalidMessage, ParseError, UnknownOp
from caris.geometry import LaserScan, Pose2D, TwistCommand, normalize_angle


class Op(str, Enum):
    ADVERTISE = "advertise"
    UNADVERTISE = "unadvertise"
    PUBLISH = "publish"
    SUBSCRIBE = "subscribe"
    UNSUBSCRIBE = "unsubscribe"


# Ops that must carry a message type name / a payload.
_TYPE_REQUIRED = {Op.ADVERTISE, Op.SUBSCRIBE}
_MSG_REQUIRED = {Op.PUBLISH}


@dataclass(frozen=True)
class BridgeMessage:
    op: Op
    topic: str
    type: Optional[str] = None
    msg: Optional[dict[str, Any]] = None
    id: Optional[str] = None

    def validate(self) -> None:
        if not self.topic:
            raise InvalidMessage(f"{self.op.value}: topic is required")
        if self.op in _TYPE_REQUIRED and not self.type:
            raise InvalidMessage(f"{self.op.value}: type is required")
        if self.op in _MSG_REQUIRED and self.msg is None:
            raise InvalidMessage(f"{self.op.value}: msg is required")


def encode_message(m: BridgeMessage) -> bytes:
    """Serialize to one UTF-8 JSON object; optional fields omitted when absent."""
    m.validate()
    frame: dict[str, Any] = {"op": m.op.value, "topic": m.topic}
    if m.type is not None:
        frame["type"] = m.type
    if m.msg is not None:
        frame["msg"] = m.msg
    if m.id is not None:
        frame["id"] = m.id
    return json.dumps(frame, separators=(",", ":"), allow_nan=False).encode("utf-8")


def decode_message(data: bytes | str) -> BridgeMessage:
    """Inverse of encode_message. Unknown top-level fields are ignored."""
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ParseError(str(e)) from e
    if not isinstance(obj, dict):
        raise ParseError("frame is not a JSON object")
    op_name = obj.get("op")
    try:
        op = Op(op_name)
    except ValueError:
        raise UnknownOp(f"unrecognized op: {op_name!r}") from None
    m = BridgeMessage(
        op=op,
        topic=obj.get("topic", ""),
        type=obj.get("type"),
        msg=obj.get("msg"),
        id=obj.get("id"),
    )
    m.validate()
    return m


# --- payload codecs for the topics this system speaks ---

def twist_to_msg(t: TwistCommand) -> dict[str, Any]:
    return {
        "linear": {"x": float(t.linear), "y": 0.0, "z": 0.0},
        "angular": {"x": 0.0, "y": 0.0, "z": float(t.angular)},
    }


def twist_from_msg(msg: dict[str, Any]) -> TwistCommand:
    return TwistCommand(
        linear=float(msg.get("linear", {}).get("x", 0.0)),
        angular=float(msg.get("angular", {}).get("z", 0.0)),
    )


# JSON cannot carry Infinity, so "no return" goes over the wire as a finite
# value just past range_max.
def _wire_range(r: float, range_max: float) -> float:
    if not math.isfinite(r) or r > range_max:
        return range_max + 1.0
    return float(r)


def laserscan_to_msg(scan: LaserScan, stamp: float = 0.0) -> dict[str, Any]:
    return {
        "header": {"stamp": stamp, "frame_id": "laser"},
        "angle_min": scan.angle_min,
        "angle_max": scan.angle_max,
        "angle_increment": scan.angle_increment,
        "range_min": 0.0,
        "range_max": scan.range_max,
        "ranges": [_wire_range(r, scan.range_max) for r in scan.ranges],
    }


def laserscan_from_msg(msg: dict[str, Any]) -> LaserScan:
    return LaserScan(
        angle_min=float(msg["angle_min"]),
        angle_max=float(msg["angle_max"]),
        angle_increment=float(msg["angle_increment"]),
        range_max=float(msg["range_max"]),
        ranges=tuple(float(r) for r in msg["ranges"]),
    )


def odom_to_msg(pose: Pose2D, twist: TwistCommand, stamp: float = 0.0) -> dict[str, Any]:
    half = pose.theta / 2.0
    return {
        "header": {"stamp": stamp, "frame_id": "odom"},
        "child_frame_id": "base_link",
        "pose": {
            "pose": {
                "position": {"x": pose.x, "y": pose.y, "z": 0.0},
                "orientation": {"x": 0.0, "y": 0.0, "z": math.sin(half), "w": math.cos(half)},
            }
        },
        "twist": {"twist": twist_to_msg(twist)},
    }


def odom_from_msg(msg: dict[str, Any]) -> tuple[Pose2D, float]:
    """Extract (pose, stamp) from an odometry payload."""
    p = msg["pose"]["pose"]
    pos = p["position"]
    q = p["orientation"]
    yaw = math.atan2(
        2.0 * (q["w"] * q["z"] + q["x"] * q["y"]),
        1.0 - 2.0 * (q["y"] ** 2 + q["z"] ** 2),
    )
    stamp = float(msg.get("header", {}).get("stamp", 0.0))
    return Pose2D(float(pos["x"]), float(pos["y"]), normalize_angle(yaw)), stamp
