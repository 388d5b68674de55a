"""Append-only session directories and their bit-exact replay.

Layout per session:
    events.jsonl    one canonical JSON line per event (the machine stream)
    commands.log    plain-text mirror of teleop and TTS activity
    llm/<seq>.json  one file per language-model exchange
    snapshots/<seq>.png
    scenario.json   copy of the active scenario at session start
"""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path
from typing import Any, Callable, Iterator, Optional

from caris.errors import (
    CorruptSession,
    DisabledByScenario,
    InvalidImage,
    SessionClosed,
    StorageError,
)
from caris.recorder.events import EventKind, SessionEvent, event_to_line, parse_event_line

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class SessionRecorder:
    """Serialized single-writer event log; record() returns after fsync."""

    def __init__(self, directory: Path, scenario, clock: Callable[[], float]):
        self.directory = directory
        self.scenario = scenario
        self._clock = clock
        self._t0 = clock()
        self._last_t_ms = 0
        self._seq = 0
        self._lock = threading.Lock()
        self._closed = False
        self.last_event: Optional[SessionEvent] = None
        self._events = open(directory / "events.jsonl", "ab")
        self._commands = open(directory / "commands.log", "ab")

    # --- lifecycle ---

    @classmethod
    def start(cls, root: str | Path, scenario, clock: Callable[[], float] | None = None) -> "SessionRecorder":
        clock = clock or time.monotonic
        root = Path(root)
        stamp = time.strftime("%Y%m%dT%H%M%S")
        base = f"{stamp}_{scenario.name}"
        try:
            root.mkdir(parents=True, exist_ok=True)
            directory = _unique_dir(root, base)
            (directory / "llm").mkdir()
            (directory / "snapshots").mkdir()
            (directory / "scenario.json").write_text(
                json.dumps(scenario.model_dump(), indent=2), encoding="utf-8"
            )
        except OSError as e:
            raise StorageError(f"cannot create session under {root}: {e}") from e
        return cls(directory, scenario, clock)

    def close(self) -> None:
        with self._lock:
            if self._closed:
                return
            self._closed = True
            self._events.close()
            self._commands.close()

    # --- recording ---

    def record(
        self,
        kind: EventKind,
        payload: dict[str, Any],
        person_id: Optional[int] = None,
        note: Optional[str] = None,
    ) -> SessionEvent:
        with self._lock:
            return self._append(kind, payload, person_id, note)

    def _append(self, kind, payload, person_id=None, note=None) -> SessionEvent:
        if self._closed:
            raise SessionClosed("session is closed")
        self._seq += 1
        t_ms = max(self._last_t_ms, int(round((self._clock() - self._t0) * 1000)))
        self._last_t_ms = t_ms
        event = SessionEvent(self._seq, t_ms, kind, payload, person_id, note)
        self._events.write(event_to_line(event))
        self._events.flush()
        os.fsync(self._events.fileno())
        if kind is EventKind.TELEOP:
            self._command_line(f"{t_ms} TELEOP {payload['command']} {payload['scale']}")
        elif kind is EventKind.TTS:
            self._command_line(f"{t_ms} TTS {payload['text']}")
        self.last_event = event
        return event

    def _command_line(self, line: str) -> None:
        self._commands.write(line.encode("utf-8") + b"\n")
        self._commands.flush()
        os.fsync(self._commands.fileno())

    def record_snapshot(
        self, image: bytes, person_id: Optional[int] = None, note: Optional[str] = None
    ) -> Path:
        if not getattr(self.scenario.enabled_features, "photo_capture", True):
            raise DisabledByScenario("photo capture is disabled by the active scenario")
        if not image.startswith(PNG_MAGIC):
            raise InvalidImage("snapshot payload is not a PNG")
        with self._lock:
            if self._closed:
                raise SessionClosed("session is closed")
            path = self.directory / "snapshots" / f"{self._seq + 1}.png"
            path.write_bytes(image)
            self._append(
                EventKind.SNAPSHOT,
                {"path": f"snapshots/{path.name}", "bytes": len(image)},
                person_id,
                note,
            )
        return path

    def record_llm(self, exchange, image: bytes | None = None) -> Path:
        """Persist one exchange as its own JSON file plus an llm event."""
        with self._lock:
            if self._closed:
                raise SessionClosed("session is closed")
            seq = self._seq + 1
            if image is not None:
                image_path = self.directory / "llm" / f"{seq}.png"
                image_path.write_bytes(image)
                exchange.image = f"llm/{image_path.name}"
            path = self.directory / "llm" / f"{seq}.json"
            path.write_text(
                json.dumps(exchange.to_dict(), indent=2, ensure_ascii=False),
                encoding="utf-8",
            )
            self._append(
                EventKind.LLM,
                {
                    "path": f"llm/{path.name}",
                    "exchange_id": exchange.exchange_id,
                    "provider": exchange.provider,
                    "ok": exchange.error is None,
                },
                exchange.person_id,
            )
        return path


def _unique_dir(root: Path, base: str) -> Path:
    directory = root / base
    counter = 2
    while directory.exists():
        directory = root / f"{base}_{counter}"
        counter += 1
    directory.mkdir()
    return directory


def replay(session_dir: str | Path) -> Iterator[SessionEvent]:
    """Yield events in seq order; refuse gaps, regressions, and bad lines."""
    path = Path(session_dir) / "events.jsonl"
    if not path.exists():
        raise CorruptSession("events.jsonl missing", 0)
    expected_seq = 1
    last_t = 0
    with open(path, "rb") as f:
        for line_no, raw in enumerate(f, start=1):
            if not raw.endswith(b"\n"):
                raise CorruptSession("truncated line", line_no)
            event = parse_event_line(raw.decode("utf-8"), line_no)
            if event.seq != expected_seq:
                raise CorruptSession(
                    f"seq {event.seq} where {expected_seq} expected", line_no
                )
            if event.t_ms < last_t:
                raise CorruptSession("timestamp regression", line_no)
            expected_seq += 1
            last_t = event.t_ms
            yield event


def serialize_events(events) -> bytes:
    return b"".join(event_to_line(e) for e in events)
