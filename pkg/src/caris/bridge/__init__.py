from caris.bridge.messages import (
    BridgeMessage,
    Op,
    decode_message,
    encode_message,
    laserscan_from_msg,
    laserscan_to_msg,
    odom_from_msg,
    odom_to_msg,
    twist_from_msg,
    twist_to_msg,
)
from caris.bridge.teleop import TeleopCommand, TeleopLimits, teleop_to_twist
from caris.bridge.client import BridgeClient, SpeechHandle, TopicConfig

__all__ = [
    "BridgeMessage",
    "Op",
    "encode_message",
    "decode_message",
    "twist_to_msg",
    "twist_from_msg",
    "laserscan_to_msg",
    "laserscan_from_msg",
    "odom_to_msg",
    "odom_from_msg",
    "TeleopCommand",
    "TeleopLimits",
    "teleop_to_twist",
    "BridgeClient",
    "SpeechHandle",
    "TopicConfig",
]
