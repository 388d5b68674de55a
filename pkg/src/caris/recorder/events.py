"""Typed session events and their canonical JSONL form.

Serialization is canonical (fixed key order, compact separators) so that
replaying a session and re-serializing it reproduces the log byte for
byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from caris.errors import CorruptSession


class EventKind(str, Enum):
    TELEOP = "teleop"
    TTS = "tts"
    STT = "stt"
    SNAPSHOT = "snapshot"
    LLM = "llm"
    TRACK = "track"
    REGISTRY = "registry"
    SCENARIO = "scenario"


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    t_ms: int
    kind: EventKind
    payload: dict[str, Any]
    person_id: Optional[int] = None
    note: Optional[str] = None


def event_to_line(event: SessionEvent) -> bytes:
    doc: dict[str, Any] = {
        "seq": event.seq,
        "t_ms": event.t_ms,
        "kind": event.kind.value,
        "payload": event.payload,
    }
    if event.person_id is not None:
        doc["person_id"] = event.person_id
    if event.note is not None:
        doc["note"] = event.note
    return (json.dumps(doc, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")


def parse_event_line(line: str, line_no: int) -> SessionEvent:
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as e:
        raise CorruptSession(f"bad JSON: {e.msg}", line_no) from e
    try:
        return SessionEvent(
            seq=int(doc["seq"]),
            t_ms=int(doc["t_ms"]),
            kind=EventKind(doc["kind"]),
            payload=doc["payload"],
            person_id=doc.get("person_id"),
            note=doc.get("note"),
        )
    except (KeyError, ValueError) as e:
        raise CorruptSession(f"bad event: {e}", line_no) from e
