"""`sim-robot` entry point."""

from __future__ import annotations

import argparse
import asyncio
import logging

from caris.sim.server import SimServer
from caris.sim.world import load_world


async def _run(args: argparse.Namespace) -> None:
    world = load_world(args.world)
    server = SimServer(world, host=args.host, port=args.port, realtime=args.realtime)
    await server.start()
    logging.info("sim-robot serving %s on %s", args.world, server.url)
    await asyncio.Event().wait()


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(description="Simulated differential-drive robot peer")
    parser.add_argument("--world", required=True, help="world JSON file")
    parser.add_argument("--port", type=int, default=9090)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument(
        "--realtime",
        action="store_true",
        help="lock the virtual clock to the wall clock (default: fixed-step pacing)",
    )
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
    try:
        asyncio.run(_run(args))
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
