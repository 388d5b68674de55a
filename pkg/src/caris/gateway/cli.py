"""`caris-server` entry point."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

import uvicorn

from caris.gateway.app import create_app
from caris.gateway.state import GatewaySettings
from caris.scenario import load_scenario


def default_console_dir() -> Path | None:
    candidate = Path(__file__).resolve().parents[3] / "frontend" / "dist"
    return candidate if candidate.exists() else None


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(description="Wizard-of-Oz robot gateway service")
    parser.add_argument("--robot", help="robot websocket endpoint, e.g. ws://127.0.0.1:9090")
    parser.add_argument("--scenario", required=True, help="scenario JSON file")
    parser.add_argument("--storage", default="sessions", help="session storage root")
    parser.add_argument("--listen", default="127.0.0.1:8000", help="host:port to serve on")
    parser.add_argument("--console", help="directory with a built wizard console")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
    host, _, port = args.listen.rpartition(":")
    settings = GatewaySettings(
        scenario=load_scenario(args.scenario),
        storage_root=Path(args.storage),
        robot_url=args.robot,
    )
    console = Path(args.console) if args.console else default_console_dir()
    app = create_app(settings, console_dir=console)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
