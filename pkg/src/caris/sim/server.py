"""Bridge-protocol server wrapping the simulator engine.

Clients publish /cmd_vel and /tts; the server steps the engine on a fixed
virtual clock and broadcasts /odom and /scan. Every subscriber to a topic
receives the same serialized frames. TTS payloads are echoed onto an
inspectable spoken log and rebroadcast on /spoken.
"""

from __future__ import annotations

import asyncio
import contextlib
import logging
import threading
import time
from collections import deque

from websockets.asyncio.server import serve
from websockets.exceptions import ConnectionClosed

from caris.bridge.messages import (
    BridgeMessage,
    Op,
    decode_message,
    encode_message,
    laserscan_to_msg,
    odom_to_msg,
    twist_from_msg,
)
from caris.errors import BindError, ParseError, UnknownOp
from caris.sim.engine import SimConfig, SimEngine
from caris.sim.world import World

log = logging.getLogger(__name__)


class SimServer:
    def __init__(
        self,
        world: World,
        config: SimConfig | None = None,
        host: str = "127.0.0.1",
        port: int = 0,
        realtime: bool = False,
    ):
        self.engine = SimEngine(world, config)
        self.host = host
        self.port = port
        self.realtime = realtime
        self.spoken: list[str] = []
        self._subs: dict[str, set] = {}
        self._pending_commands: deque = deque()
        self._server = None
        self._loop_task: asyncio.Task | None = None

    async def start(self) -> None:
        try:
            self._server = await serve(self._handler, self.host, self.port, max_size=2**24)
        except OSError as e:
            raise BindError(f"cannot bind {self.host}:{self.port}: {e}") from e
        self.port = self._server.sockets[0].getsockname()[1]
        self._loop_task = asyncio.create_task(self._sim_loop(), name="sim-loop")

    async def stop(self) -> None:
        if self._loop_task is not None:
            self._loop_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await self._loop_task
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    @property
    def url(self) -> str:
        return f"ws://{self.host}:{self.port}"

    # --- client handling ---

    async def _handler(self, ws) -> None:
        subscribed: set[str] = set()
        try:
            async for raw in ws:
                try:
                    m = decode_message(raw)
                except (ParseError, UnknownOp) as e:
                    log.warning("rejecting bad frame: %s", e)
                    continue
                if m.op is Op.SUBSCRIBE:
                    self._subs.setdefault(m.topic, set()).add(ws)
                    subscribed.add(m.topic)
                elif m.op is Op.UNSUBSCRIBE:
                    self._subs.get(m.topic, set()).discard(ws)
                    subscribed.discard(m.topic)
                elif m.op is Op.PUBLISH:
                    self._on_publish(m)
                # advertise/unadvertise are bookkeeping no-ops here
        except ConnectionClosed:
            pass
        finally:
            for topic in subscribed:
                self._subs.get(topic, set()).discard(ws)

    def _on_publish(self, m: BridgeMessage) -> None:
        if m.topic == "/cmd_vel":
            self._pending_commands.append(twist_from_msg(m.msg))
        elif m.topic == "/tts":
            text = str(m.msg.get("text", ""))
            self.spoken.append(text)
            self._broadcast("/spoken", {"text": text})

    def _broadcast(self, topic: str, msg: dict) -> None:
        clients = self._subs.get(topic)
        if not clients:
            return
        data = encode_message(BridgeMessage(op=Op.PUBLISH, topic=topic, msg=msg)).decode("utf-8")
        for ws in list(clients):
            task = asyncio.ensure_future(ws.send(data))
            # dead peers are dropped by their handler; just absorb the failure
            task.add_done_callback(
                lambda t: None if t.cancelled() else t.exception()
            )

    # --- simulation loop ---

    def _tick(self) -> None:
        while self._pending_commands:
            self.engine.set_command(self._pending_commands.popleft())
        self.engine.step()

    def _publish_sensors(self, step_index: int) -> None:
        cfg = self.engine.config
        state = self.engine.state
        odom_every = max(1, round(1.0 / (cfg.odom_rate * cfg.dt)))
        scan_every = max(1, round(1.0 / (cfg.scan_rate * cfg.dt)))
        if step_index % odom_every == 0:
            self._broadcast("/odom", odom_to_msg(state.pose, state.commanded, stamp=state.clock))
        if step_index % scan_every == 0:
            self._broadcast("/scan", laserscan_to_msg(self.engine.scan(), stamp=state.clock))

    async def _sim_loop(self) -> None:
        dt = self.engine.config.dt
        step_index = 0
        start = time.monotonic()
        while True:
            if self.realtime:
                # Lock virtual time to the wall clock, catching up when behind.
                behind = int((time.monotonic() - start) / dt) - step_index
                for _ in range(max(1, behind)):
                    step_index += 1
                    self._tick()
                    self._publish_sensors(step_index)
                next_deadline = start + (step_index + 1) * dt
                await asyncio.sleep(max(0.0, next_deadline - time.monotonic()))
            else:
                step_index += 1
                self._tick()
                self._publish_sensors(step_index)
                await asyncio.sleep(dt)


class BackgroundSimServer:
    """Runs a SimServer on its own event loop thread (test harness helper)."""

    def __init__(self, world: World, config: SimConfig | None = None, realtime: bool = False):
        self._ready = threading.Event()
        self._loop: asyncio.AbstractEventLoop | None = None
        self.server = SimServer(world, config, realtime=realtime)
        self._thread = threading.Thread(target=self._run, name="sim-server", daemon=True)

    def _run(self) -> None:
        self._loop = asyncio.new_event_loop()
        asyncio.set_event_loop(self._loop)
        self._loop.run_until_complete(self.server.start())
        self._ready.set()
        try:
            self._loop.run_forever()
        finally:
            self._loop.run_until_complete(self._loop.shutdown_asyncgens())
            self._loop.close()

    def start(self) -> "BackgroundSimServer":
        self._thread.start()
        self._ready.wait(timeout=10)
        return self

    @property
    def url(self) -> str:
        return self.server.url

    def stop(self) -> None:
        if self._loop is None:
            return
        fut = asyncio.run_coroutine_threadsafe(self._shutdown(), self._loop)
        with contextlib.suppress(Exception):
            fut.result(timeout=5)
        self._loop.call_soon_threadsafe(self._loop.stop)
        self._thread.join(timeout=5)

    async def _shutdown(self) -> None:
        await self.server.stop()
        pending = [t for t in asyncio.all_tasks() if t is not asyncio.current_task()]
        for task in pending:
            task.cancel()
        await asyncio.gather(*pending, return_exceptions=True)
