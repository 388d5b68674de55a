"""`caris-replay` entry point: print a recorded session's event stream."""

from __future__ import annotations

import argparse
import sys

from caris.errors import CorruptSession
from caris.recorder.events import event_to_line
from caris.recorder.session import replay


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Replay a recorded session as JSON lines")
    parser.add_argument("session_dir", help="session directory containing events.jsonl")
    parser.add_argument("--kind", help="only events of this kind")
    parser.add_argument("--person", type=int, help="only events attributed to this person id")
    parser.add_argument("--notes", action="store_true", help="only annotated events")
    args = parser.parse_args(argv)
    try:
        for event in replay(args.session_dir):
            if args.kind and event.kind.value != args.kind:
                continue
            if args.person is not None and event.person_id != args.person:
                continue
            if args.notes and event.note is None:
                continue
            sys.stdout.buffer.write(event_to_line(event))
    except CorruptSession as e:
        print(f"corrupt session: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
