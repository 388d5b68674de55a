"""Websocket client maintaining a pub/sub session with a robot endpoint.

One reader task dispatches inbound frames to per-topic sinks in arrival
order; one writer task drains a queue so that concurrent publishers are
serialized and each publish yields exactly one outbound frame.
"""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass
from typing import Any, Awaitable, Callable

from websockets.asyncio.client import connect
from websockets.exceptions import ConnectionClosed

from caris.bridge.messages import (
    BridgeMessage,
    Op,
    decode_message,
    encode_message,
    twist_to_msg,
)
from caris.errors import Disconnected, ParseError, UnknownOp
from caris.geometry import TwistCommand

log = logging.getLogger(__name__)

Sink = Callable[[dict[str, Any]], None | Awaitable[None]]


@dataclass(frozen=True)
class TopicConfig:
    """Topic names are a convention, not a protocol requirement."""

    cmd_vel: str = "/cmd_vel"
    scan: str = "/scan"
    odom: str = "/odom"
    tts: str = "/tts"


@dataclass(frozen=True)
class SpeechHandle:
    """Returned by say() so callers can log what was voiced where."""

    topic: str
    text: str


class BridgeClient:
    def __init__(self, topics: TopicConfig | None = None):
        self.topics = topics or TopicConfig()
        self._ws = None
        self._sinks: dict[str, list[Sink]] = {}
        self._send_queue: asyncio.Queue[tuple[bytes, asyncio.Future]] = asyncio.Queue()
        self._reader_task: asyncio.Task | None = None
        self._writer_task: asyncio.Task | None = None
        self._closed = True

    @classmethod
    async def open(cls, url: str, topics: TopicConfig | None = None) -> "BridgeClient":
        client = cls(topics)
        await client.connect(url)
        return client

    async def connect(self, url: str) -> None:
        self._ws = await connect(url, max_size=2**24)
        self._closed = False
        self._reader_task = asyncio.create_task(self._read_loop(), name="bridge-reader")
        self._writer_task = asyncio.create_task(self._write_loop(), name="bridge-writer")

    @property
    def connected(self) -> bool:
        return not self._closed

    async def close(self) -> None:
        self._closed = True
        tasks = [t for t in (self._reader_task, self._writer_task) if t is not None]
        for task in tasks:
            task.cancel()
        if tasks:
            await asyncio.gather(*tasks, return_exceptions=True)
        if self._ws is not None:
            try:
                await self._ws.close()
            except Exception:
                pass
        self._fail_pending()

    # --- outbound ---

    async def send(self, m: BridgeMessage) -> None:
        """Queue one frame and wait until it is on the wire."""
        if self._closed:
            raise Disconnected("bridge connection is closed")
        fut: asyncio.Future = asyncio.get_running_loop().create_future()
        await self._send_queue.put((encode_message(m), fut))
        await fut

    async def publish(self, topic: str, msg: dict[str, Any], type: str | None = None) -> None:
        await self.send(BridgeMessage(op=Op.PUBLISH, topic=topic, type=type, msg=msg))

    async def publish_twist(self, t: TwistCommand) -> None:
        await self.publish(self.topics.cmd_vel, twist_to_msg(t), type="geometry_msgs/Twist")

    async def say(self, text: str) -> SpeechHandle:
        await self.publish(self.topics.tts, {"text": text}, type="std_msgs/String")
        return SpeechHandle(topic=self.topics.tts, text=text)

    # --- inbound ---

    async def subscribe(self, topic: str, type: str, sink: Sink) -> None:
        first = topic not in self._sinks
        self._sinks.setdefault(topic, []).append(sink)
        if first:
            await self.send(BridgeMessage(op=Op.SUBSCRIBE, topic=topic, type=type))

    async def subscribe_scan(self, sink: Sink) -> None:
        await self.subscribe(self.topics.scan, "sensor_msgs/LaserScan", sink)

    async def subscribe_odom(self, sink: Sink) -> None:
        await self.subscribe(self.topics.odom, "nav_msgs/Odometry", sink)

    # --- loops ---

    async def _read_loop(self) -> None:
        try:
            async for raw in self._ws:
                try:
                    m = decode_message(raw)
                except (ParseError, UnknownOp) as e:
                    log.warning("dropping bad inbound frame: %s", e)
                    continue
                if m.op is not Op.PUBLISH or m.msg is None:
                    continue
                for sink in self._sinks.get(m.topic, []):
                    result = sink(m.msg)
                    if asyncio.iscoroutine(result):
                        await result
        except (ConnectionClosed, asyncio.CancelledError):
            pass
        finally:
            self._closed = True
            self._fail_pending()

    async def _write_loop(self) -> None:
        try:
            while True:
                data, fut = await self._send_queue.get()
                try:
                    await self._ws.send(data.decode("utf-8"))
                except ConnectionClosed as e:
                    self._closed = True
                    if not fut.done():
                        fut.set_exception(Disconnected(str(e)))
                    self._fail_pending()
                    return
                if not fut.done():
                    fut.set_result(None)
        except asyncio.CancelledError:
            self._fail_pending()

    def _fail_pending(self) -> None:
        while not self._send_queue.empty():
            _, fut = self._send_queue.get_nowait()
            if not fut.done():
                fut.set_exception(Disconnected("bridge connection is closed"))
