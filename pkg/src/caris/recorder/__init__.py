from caris.recorder.events import EventKind, SessionEvent, event_to_line, parse_event_line
from caris.recorder.session import SessionRecorder, replay, serialize_events

__all__ = [
    "EventKind",
    "SessionEvent",
    "event_to_line",
    "parse_event_line",
    "SessionRecorder",
    "replay",
    "serialize_events",
]
