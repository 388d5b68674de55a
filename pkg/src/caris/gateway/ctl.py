"""`caris-ctl`: a thin command-line client for the gateway API."""

from __future__ import annotations

import argparse
import base64
import json
import sys
from pathlib import Path

import httpx


def _print(doc) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Drive a running caris gateway")
    parser.add_argument("--url", default="http://127.0.0.1:8000", help="gateway base URL")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("teleop", help="send a movement command")
    p.add_argument("command", choices=["forward", "backward", "rotate_left", "rotate_right", "stop"])
    p.add_argument("--scale", type=float, default=1.0)

    p = sub.add_parser("say", help="speak through the robot")
    p.add_argument("text")
    p.add_argument("--person", type=int)

    p = sub.add_parser("llm", help="run a completion")
    p.add_argument("prompt")
    p.add_argument("--provider")
    p.add_argument("--image", help="path to a PNG to attach")

    p = sub.add_parser("rename", help="rename a person")
    p.add_argument("person_id", type=int)
    p.add_argument("label")

    p = sub.add_parser("history", help="show a person's interaction history")
    p.add_argument("person_id", type=int)

    p = sub.add_parser("snapshot", help="capture the current camera frame")
    p.add_argument("--person", type=int)

    p = sub.add_parser("note", help="annotate the session")
    p.add_argument("text")
    p.add_argument("--person", type=int)

    p = sub.add_parser("scenario", help="get or set the active scenario")
    p.add_argument("file", nargs="?", help="scenario JSON to activate; omit to fetch")

    sub.add_parser("suggest", help="list suggested prompts")
    sub.add_parser("state", help="fetch one state frame")
    sub.add_parser("health", help="gateway health")

    args = parser.parse_args(argv)
    client = httpx.Client(base_url=args.url, timeout=60.0)

    if args.cmd == "teleop":
        r = client.post("/teleop", json={"command": args.command, "scale": args.scale})
    elif args.cmd == "say":
        r = client.post("/speak", json={"text": args.text, "person_id": args.person})
    elif args.cmd == "llm":
        body = {"prompt": args.prompt, "provider": args.provider}
        if args.image:
            body["image_b64"] = base64.b64encode(Path(args.image).read_bytes()).decode()
        r = client.post("/llm/complete", json=body)
    elif args.cmd == "rename":
        r = client.post(f"/persons/{args.person_id}/rename", json={"label": args.label})
    elif args.cmd == "history":
        r = client.get(f"/persons/{args.person_id}/history")
    elif args.cmd == "snapshot":
        r = client.post("/snapshot", json={"person_id": args.person})
    elif args.cmd == "note":
        r = client.post("/annotate", json={"text": args.text, "person_id": args.person})
    elif args.cmd == "scenario":
        if args.file:
            doc = json.loads(Path(args.file).read_text(encoding="utf-8"))
            r = client.put("/scenario", json=doc)
        else:
            r = client.get("/scenario")
    elif args.cmd == "suggest":
        r = client.get("/suggestions")
    elif args.cmd == "state":
        r = client.get("/state/frame")
    else:
        r = client.get("/healthz")

    try:
        _print(r.json())
    except ValueError:
        print(r.text)
    return 0 if r.status_code < 400 else 1


if __name__ == "__main__":
    raise SystemExit(main())
