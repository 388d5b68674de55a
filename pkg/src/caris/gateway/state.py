"""Gateway runtime: owns the bridge, tracker, mapper, recorder, and LLM services.

Concurrency layout: tracker and registry mutations serialize through one
asyncio lock; scans flow through a single-consumer queue whose grid work
runs off the event loop; the recorder is its own serialized writer. The
teleop path touches none of the slow pieces, so it stays responsive while
completions stall.
"""

from __future__ import annotations

import asyncio
import contextlib
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from caris.bridge.client import BridgeClient
from caris.bridge.messages import laserscan_from_msg, odom_from_msg
from caris.conversation.providers import build_providers
from caris.conversation.service import ConversationService
from caris.conversation.speech import MockTranscriber, SpeechService
from caris.errors import Disconnected
from caris.gateway.video import VideoHub
from caris.mapping.builder import MapBuilder
from caris.recorder.events import EventKind
from caris.recorder.session import SessionRecorder
from caris.scenario import ScenarioConfig
from caris.tracking.registry import PersonRegistry
from caris.tracking.tracker import PeopleTracker, TrackerParams, TrackerSnapshot

log = logging.getLogger(__name__)


@dataclass
class GatewaySettings:
    scenario: ScenarioConfig
    storage_root: Path
    robot_url: Optional[str] = None
    map_extent_m: float = 20.0
    reconnect_cooldown_s: float = 1.0
    tracker_params: TrackerParams = field(default_factory=TrackerParams)


class BridgeClock:
    """Virtual session clock: follows robot stamps when a robot is wired,
    wall time otherwise. Never runs backwards."""

    def __init__(self, virtual: bool):
        self.virtual = virtual
        self._wall_start = time.monotonic()
        self._latest = 0.0

    def observe_stamp(self, stamp: float) -> None:
        if stamp > self._latest:
            self._latest = stamp

    def __call__(self) -> float:
        if self.virtual:
            return self._latest
        return time.monotonic() - self._wall_start


class RecorderFacade:
    """Recorder front that mirrors person-attributed events into histories."""

    def __init__(self, recorder: SessionRecorder, registry: PersonRegistry):
        self._recorder = recorder
        self.registry = registry

    @property
    def directory(self) -> Path:
        return self._recorder.directory

    @property
    def scenario(self):
        return self._recorder.scenario

    @scenario.setter
    def scenario(self, value) -> None:
        self._recorder.scenario = value

    def record(self, kind, payload, person_id=None, note=None):
        event = self._recorder.record(kind, payload, person_id, note)
        self._attach(person_id, event)
        return event

    def record_snapshot(self, image, person_id=None, note=None):
        path = self._recorder.record_snapshot(image, person_id, note)
        self._attach_last(person_id)
        return path

    def record_llm(self, exchange, image=None):
        path = self._recorder.record_llm(exchange, image=image)
        self._attach_last(exchange.person_id)
        return path

    def _attach(self, person_id, event) -> None:
        if person_id is not None:
            with contextlib.suppress(Exception):
                self.registry.attach_event(person_id, event)

    def _attach_last(self, person_id) -> None:
        if person_id is not None and self._recorder.last_event is not None:
            self._attach(person_id, self._recorder.last_event)

    def close(self) -> None:
        self._recorder.close()


class Runtime:
    def __init__(self, settings: GatewaySettings):
        self.settings = settings
        self.scenario = settings.scenario
        self.clock = BridgeClock(virtual=settings.robot_url is not None)
        self.registry = PersonRegistry()
        recorder = SessionRecorder.start(settings.storage_root, self.scenario, clock=self.clock)
        self.recorder = RecorderFacade(recorder, self.registry)
        self.tracker = PeopleTracker(settings.tracker_params, registry=self.registry)
        self.tracker_lock = asyncio.Lock()
        extent = settings.map_extent_m
        self.mapper = MapBuilder(extent, extent, origin_centered(extent))
        self.video = VideoHub()
        self.providers = build_providers(self.scenario.providers)
        self.conversation = ConversationService(
            self.providers, default_provider=self.scenario.provider, recorder=self.recorder
        )
        self.speech = SpeechService(
            scenario_provider=lambda: self.scenario,
            bridge=None,
            transcriber=MockTranscriber(),
            recorder=self.recorder,
        )
        self.bridge: Optional[BridgeClient] = None
        self.last_utterance: Optional[str] = None
        self._scan_queue: asyncio.Queue = asyncio.Queue(maxsize=4)
        self._scan_task: Optional[asyncio.Task] = None
        self._last_connect_attempt = -1e9
        if self.scenario.default_role:
            self.conversation.role = self.scenario.default_role

    # --- lifecycle ---

    async def start(self) -> None:
        self._scan_task = asyncio.create_task(self._consume_scans(), name="map-consumer")
        if self.settings.robot_url:
            try:
                await self.ensure_bridge()
            except Disconnected as e:
                log.warning("robot not reachable at startup: %s", e)

    async def stop(self) -> None:
        if self._scan_task is not None:
            self._scan_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await self._scan_task
        if self.bridge is not None:
            await self.bridge.close()
        self.registry.save_galleries(self.recorder.directory / "galleries.json")
        self.recorder.close()

    # --- robot link (reconnects are the gateway's call, not the bridge's) ---

    async def ensure_bridge(self) -> BridgeClient:
        if self.bridge is not None and self.bridge.connected:
            return self.bridge
        if not self.settings.robot_url:
            raise Disconnected("no robot endpoint configured")
        now = time.monotonic()
        if now - self._last_connect_attempt < self.settings.reconnect_cooldown_s:
            raise Disconnected("robot endpoint unavailable (cooling down)")
        self._last_connect_attempt = now
        try:
            bridge = await BridgeClient.open(self.settings.robot_url)
            await bridge.subscribe_odom(self._on_odom)
            await bridge.subscribe_scan(self._on_scan)
        except OSError as e:
            raise Disconnected(f"cannot reach robot endpoint: {e}") from e
        self.bridge = bridge
        self.speech.bridge = bridge
        log.info("bridge connected to %s", self.settings.robot_url)
        return bridge

    def _on_odom(self, msg: dict) -> None:
        pose, stamp = odom_from_msg(msg)
        self.clock.observe_stamp(stamp)
        self.mapper.on_odometry(pose)

    def _on_scan(self, msg: dict) -> None:
        scan = laserscan_from_msg(msg)
        self.clock.observe_stamp(float(msg.get("header", {}).get("stamp", 0.0)))
        if self._scan_queue.full():  # keep only the freshest scans
            with contextlib.suppress(asyncio.QueueEmpty):
                self._scan_queue.get_nowait()
        self._scan_queue.put_nowait(scan)

    async def _consume_scans(self) -> None:
        while True:
            scan = await self._scan_queue.get()
            await asyncio.to_thread(self.mapper.on_scan, scan)

    # --- state view ---

    async def tracker_snapshot(self) -> TrackerSnapshot:
        async with self.tracker_lock:
            return self.tracker.snapshot(self.tracker.last_frame_id or 0)

    async def state_frame(self) -> dict:
        snapshot = await self.tracker_snapshot()
        pose = self.mapper.pose
        return {
            "timestamp": round(self.clock() * 1000.0, 3),
            "pose": {"x": pose.x, "y": pose.y, "theta": pose.theta},
            "tracks": [
                {
                    "track_id": t.track_id,
                    "person_id": t.person_id,
                    "label": t.label,
                    "bbox": list(t.bbox),
                }
                for t in snapshot.tracks
            ],
            "map_version": self.mapper.version,
            "last_utterance": self.last_utterance,
            "active_scenario": self.scenario.name,
        }

    # --- scenario hot swap ---

    def swap_scenario(self, scenario: ScenarioConfig) -> None:
        self.scenario = scenario
        self.providers = build_providers(scenario.providers)
        self.conversation.providers = self.providers
        self.conversation.default_provider = scenario.provider
        if scenario.default_role:
            self.conversation.role = scenario.default_role
        self.recorder.scenario = scenario
        self.recorder.record(EventKind.SCENARIO, {"action": "swap", "name": scenario.name})


def origin_centered(extent_m: float):
    from caris.geometry import Pose2D

    return Pose2D(-extent_m / 2.0, -extent_m / 2.0, 0.0)
