import io
import threading
import time
from pathlib import Path

import pytest
import uvicorn
from fastapi.testclient import TestClient
from PIL import Image

from caris.gateway.app import create_app
from caris.gateway.state import GatewaySettings
from caris.scenario import load_scenario
from caris.sim.engine import SimConfig
from caris.sim.server import BackgroundSimServer
from caris.sim.world import load_world

REPO_ROOT = Path(__file__).resolve().parent.parent


class LiveGateway:
    """Real uvicorn server on an ephemeral port (for streaming/latency tests)."""

    def __init__(self, app):
        self.app = app
        config = uvicorn.Config(
            app, host="127.0.0.1", port=0, log_level="warning", timeout_graceful_shutdown=2
        )
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def start(self) -> "LiveGateway":
        self.thread.start()
        deadline = time.monotonic() + 15
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("gateway server did not start")
            time.sleep(0.01)
        self.port = self.server.servers[0].sockets[0].getsockname()[1]
        return self

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def stop(self) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)


@pytest.fixture
def sim():
    server = BackgroundSimServer(load_world(REPO_ROOT / "worlds" / "room4x4.json"), SimConfig())
    server.start()
    yield server
    server.stop()


@pytest.fixture
def tour_scenario():
    return load_scenario(REPO_ROOT / "scenarios" / "tour_guide.json")


@pytest.fixture
def gateway(tmp_path, sim, tour_scenario):
    settings = GatewaySettings(
        scenario=tour_scenario,
        storage_root=tmp_path / "sessions",
        robot_url=sim.url,
    )
    app = create_app(settings)
    with TestClient(app) as client:
        client.runtime = app.state.runtime
        client.sim = sim
        yield client


@pytest.fixture
def live_gateway(tmp_path, sim, tour_scenario):
    settings = GatewaySettings(
        scenario=tour_scenario,
        storage_root=tmp_path / "sessions",
        robot_url=sim.url,
    )
    app = create_app(settings)
    server = LiveGateway(app).start()
    server.runtime = app.state.runtime
    server.sim = sim
    yield server
    server.stop()


@pytest.fixture
def gateway_norobot(tmp_path, tour_scenario):
    settings = GatewaySettings(
        scenario=tour_scenario,
        storage_root=tmp_path / "sessions",
        robot_url=None,
    )
    app = create_app(settings)
    with TestClient(app) as client:
        client.runtime = app.state.runtime
        yield client


def jpeg_bytes(size=(640, 480), color=(90, 120, 160)) -> bytes:
    buf = io.BytesIO()
    Image.new("RGB", size, color).save(buf, format="JPEG")
    return buf.getvalue()


def one_hot(index: int, dim: int = 128) -> list[float]:
    v = [0.0] * dim
    v[index] = 1.0
    return v


def detection_payload(frame_id: int, cx=320.0, cy=240.0, actor=0):
    return {
        "frame_id": frame_id,
        "detections": [
            {"bbox": [cx, cy, 60.0, 120.0], "confidence": 0.9, "embedding": one_hot(actor)}
        ],
    }
