import base64
import json
import time

from conftest import detection_payload, jpeg_bytes, one_hot

from caris.recorder.events import EventKind
from caris.recorder.session import replay


def wait_until(predicate, timeout=5.0, interval=0.02):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        value = predicate()
        if value:
            return value
        time.sleep(interval)
    raise AssertionError("condition not met in time")


def confirm_person(client, actor=0, start_frame=1, cx=320.0):
    """Push enough detection frames to confirm a track and mint a person."""
    for i in range(3):
        r = client.post("/detections", json=detection_payload(start_frame + i, cx=cx, actor=actor))
        assert r.status_code == 202, r.text
    persons = client.get("/persons").json()
    assert persons, "a confirmed track must create a person record"
    return persons[-1]["person_id"]


# --- teleop ---

def test_teleop_accepted_and_robot_moves(gateway):
    start_x = gateway.sim.server.engine.state.pose.x
    r = gateway.post("/teleop", json={"command": "forward", "scale": 1.0})
    assert r.status_code == 202
    wait_until(lambda: gateway.sim.server.engine.state.pose.x > start_x + 0.02)


def test_teleop_malformed_is_400(gateway):
    assert gateway.post("/teleop", json={"command": "sideways"}).status_code == 400
    assert gateway.post("/teleop", json={"command": "forward", "scale": 7}).status_code == 400


def test_teleop_without_robot_is_503(gateway_norobot):
    r = gateway_norobot.post("/teleop", json={"command": "forward", "scale": 1.0})
    assert r.status_code == 503


def test_teleop_records_event(gateway):
    gateway.post("/teleop", json={"command": "rotate_left", "scale": 0.5})
    events = [e for e in replay(gateway.runtime.recorder.directory) if e.kind is EventKind.TELEOP]
    assert len(events) == 1
    assert events[0].payload["command"] == "rotate_left"
    log = (gateway.runtime.recorder.directory / "commands.log").read_text()
    assert "TELEOP rotate_left 0.5" in log


# --- state stream ---

def test_state_frames_monotone_and_populated(gateway):
    with gateway.websocket_connect("/state") as ws:
        frames = [ws.receive_json() for _ in range(5)]
    stamps = [f["timestamp"] for f in frames]
    assert stamps == sorted(stamps)
    for f in frames:
        assert f["active_scenario"] == "tour_guide"
        assert {"x", "y", "theta"} <= set(f["pose"])


def test_state_reflects_rename_on_next_frame(gateway):
    pid = confirm_person(gateway)
    assert gateway.post(f"/persons/{pid}/rename", json={"label": "Alice"}).status_code == 200
    with gateway.websocket_connect("/state") as ws:
        frame = ws.receive_json()
    labels = [t["label"] for t in frame["tracks"]]
    assert labels == ["Alice"]


def test_state_never_exposes_tentative_tracks(gateway):
    r = gateway.post("/detections", json=detection_payload(1))
    assert r.status_code == 202
    frame = gateway.get("/state/frame").json()
    assert frame["tracks"] == []


def test_state_pose_tracks_simulator(gateway):
    gateway.post("/teleop", json={"command": "forward", "scale": 1.0})
    wait_until(lambda: gateway.get("/state/frame").json()["pose"]["x"] > 2.01)


# --- video and ingestion ---

def test_frames_reject_non_jpeg_and_out_of_order(gateway):
    r = gateway.post("/frames?frame_id=1", content=b"not a jpeg")
    assert r.status_code == 400
    assert gateway.post("/frames?frame_id=5", content=jpeg_bytes()).status_code == 202
    assert gateway.post("/frames?frame_id=5", content=jpeg_bytes()).status_code == 409
    assert gateway.post("/frames?frame_id=4", content=jpeg_bytes()).status_code == 409


def test_detections_out_of_order_409(gateway):
    assert gateway.post("/detections", json=detection_payload(3)).status_code == 202
    assert gateway.post("/detections", json=detection_payload(3)).status_code == 409


def test_detections_bad_embedding_400(gateway):
    payload = detection_payload(1)
    payload["detections"][0]["embedding"] = [2.0] * 128  # not unit norm
    assert gateway.post("/detections", json=payload).status_code == 400


def read_mjpeg_part(base_url: str) -> bytes:
    """Fetch one complete JPEG part from the live MJPEG stream."""
    import httpx

    with httpx.Client(base_url=base_url, timeout=10.0) as client:
        with client.stream("GET", "/video") as response:
            assert response.status_code == 200
            assert "multipart/x-mixed-replace" in response.headers["content-type"]
            assert "boundary=carisframe" in response.headers["content-type"]
            chunks = b""
            for chunk in response.iter_bytes():
                chunks += chunk
                if b"\r\n\r\n" not in chunks:
                    continue
                header_end = chunks.index(b"\r\n\r\n")
                header = chunks[:header_end].decode("ascii", "replace")
                assert header.startswith("--carisframe")
                length = int(header.split("Content-Length:")[1].split("\r\n")[0])
                payload_start = header_end + 4
                if len(chunks) >= payload_start + length:
                    return chunks[payload_start : payload_start + length]
    raise AssertionError("no complete MJPEG part")


def test_video_serves_placeholder_before_frames(live_gateway):
    part = read_mjpeg_part(live_gateway.url)
    assert part.startswith(b"\xff\xd8")  # JPEG magic


def test_video_overlays_confirmed_track(live_gateway):
    import io

    import httpx
    import numpy as np
    from PIL import Image

    with httpx.Client(base_url=live_gateway.url, timeout=10.0) as client:
        client.post("/frames?frame_id=1", content=jpeg_bytes())
        for i in range(1, 4):
            r = client.post("/detections", json=detection_payload(i))
            assert r.status_code == 202
    part = read_mjpeg_part(live_gateway.url)
    img = np.asarray(Image.open(io.BytesIO(part)).convert("RGB")).astype(int)
    # box outline color (50, 220, 50) survives JPEG compression approximately
    greenish = (
        (img[:, :, 1] > 150) & (img[:, :, 0] < 140) & (img[:, :, 2] < 140)
    )
    assert greenish.sum() > 50, "expected a drawn box overlay"


# --- persons ---

def test_rename_unknown_person_404(gateway):
    assert gateway.post("/persons/99/rename", json={"label": "X"}).status_code == 404


def test_rename_empty_label_400(gateway):
    pid = confirm_person(gateway)
    assert gateway.post(f"/persons/{pid}/rename", json={"label": ""}).status_code == 400


def test_group_and_history_flow(gateway):
    pid = confirm_person(gateway, actor=0, start_frame=1, cx=200.0)
    pid2 = confirm_person(gateway, actor=1, start_frame=4, cx=460.0)
    r = gateway.post("/persons/group", json={"ids": [pid, pid2], "group": "visitors"})
    assert r.status_code == 200
    persons = {p["person_id"]: p for p in gateway.get("/persons").json()}
    assert persons[pid]["group"] == "visitors"
    assert persons[pid2]["group"] == "visitors"

    gateway.post("/speak", json={"text": "hello Alice", "person_id": pid})
    history = gateway.get(f"/persons/{pid}/history").json()["events"]
    kinds = [e["kind"] for e in history]
    assert "tts" in kinds and "registry" in kinds  # the group event plus the utterance


def test_history_unknown_person_404(gateway):
    assert gateway.get("/persons/9/history").status_code == 404


# --- snapshots ---

def test_snapshot_without_frame_400(gateway):
    assert gateway.post("/snapshot", json={}).status_code == 400


def test_snapshot_saves_png(gateway):
    gateway.post("/frames?frame_id=1", content=jpeg_bytes())
    r = gateway.post("/snapshot", json={"note": "door area"})
    assert r.status_code == 200
    path = gateway.runtime.recorder.directory / r.json()["path"]
    assert path.exists()
    assert path.read_bytes().startswith(b"\x89PNG")


def test_snapshot_forbidden_in_mental_health_scenario(gateway):
    doc = json.loads((__import__("pathlib").Path("scenarios/mental_health.json")).read_text())
    assert gateway.put("/scenario", json=doc).status_code == 200
    gateway.post("/frames?frame_id=1", content=jpeg_bytes())
    assert gateway.post("/snapshot", json={}).status_code == 403


# --- conversation ---

def test_llm_complete_mock_echo(gateway):
    r = gateway.post("/llm/complete", json={"prompt": "ping", "provider": "mock"})
    assert r.status_code == 200
    doc = r.json()
    assert doc["response"].endswith("echo:ping")
    assert doc["exchange_id"]
    llm_dir = gateway.runtime.recorder.directory / "llm"
    assert len(list(llm_dir.glob("*.json"))) == 1


def test_llm_complete_with_template(gateway):
    r = gateway.post(
        "/llm/complete",
        json={
            "template_id": "describe_location",
            "vars": {"location": "the lab", "highlight": "the robots"},
            "provider": "mock",
        },
    )
    assert r.status_code == 200
    assert "the lab" in r.json()["response"]


def test_llm_template_unknown_404_missing_var_400(gateway):
    r = gateway.post("/llm/complete", json={"template_id": "nope"})
    assert r.status_code == 404
    r = gateway.post("/llm/complete", json={"template_id": "describe_location", "vars": {}})
    assert r.status_code == 400


def test_llm_empty_prompt_400(gateway):
    assert gateway.post("/llm/complete", json={"prompt": "  "}).status_code == 400


def test_llm_image_roundtrip_and_reference_saved(gateway):
    image_b64 = base64.b64encode(b"\x89PNG\r\n\x1a\nfake").decode()
    r = gateway.post(
        "/llm/complete", json={"prompt": "look", "provider": "mock", "image_b64": image_b64}
    )
    assert r.status_code == 200
    llm_dir = gateway.runtime.recorder.directory / "llm"
    saved = json.loads(next(llm_dir.glob("*.json")).read_text())
    assert saved["image"].startswith("llm/") and saved["image"].endswith(".png")
    assert (gateway.runtime.recorder.directory / saved["image"]).exists()


def test_llm_provider_failure_502(gateway, tour_scenario):
    doc = tour_scenario.model_dump()
    doc["providers"].append(
        {"name": "mock-broken", "kind": "mock", "model": "m", "options": {"fail": True}}
    )
    assert gateway.put("/scenario", json=doc).status_code == 200
    r = gateway.post("/llm/complete", json={"prompt": "hi", "provider": "mock-broken"})
    assert r.status_code == 502


def test_llm_disabled_by_scenario_403(gateway, tour_scenario):
    doc = tour_scenario.model_dump()
    doc["enabled_features"]["llm"] = False
    assert gateway.put("/scenario", json=doc).status_code == 200
    assert gateway.post("/llm/complete", json={"prompt": "hi"}).status_code == 403


def test_role_endpoint_shapes_completions(gateway):
    gateway.post("/role", json={"role": "tour guide"})
    r = gateway.post("/llm/complete", json={"prompt": "hello", "provider": "mock"})
    assert r.json()["response"].startswith("role:tour guide")


# --- speech ---

def test_speak_publishes_and_logs(gateway):
    r = gateway.post("/speak", json={"text": "welcome to the lab"})
    assert r.status_code == 200
    wait_until(lambda: "welcome to the lab" in gateway.sim.server.spoken)
    log = (gateway.runtime.recorder.directory / "commands.log").read_text()
    assert "TTS welcome to the lab" in log


def test_speak_disabled_403(gateway, tour_scenario):
    doc = tour_scenario.model_dump()
    doc["enabled_features"]["tts"] = False
    gateway.put("/scenario", json=doc)
    assert gateway.post("/speak", json={"text": "x"}).status_code == 403


def test_stt_feeds_transcript_and_suggestions(gateway):
    audio = base64.b64encode("I feel quite stressed today".encode()).decode()
    r = gateway.post("/stt", json={"audio_b64": audio})
    assert r.status_code == 200
    assert r.json()["text"] == "I feel quite stressed today"
    # swap to the scenario whose phrases trigger on "stress"
    doc = json.loads(open("scenarios/mental_health.json").read())
    gateway.put("/scenario", json=doc)
    gateway.post("/stt", json={"audio_b64": audio})
    suggestions = gateway.get("/suggestions").json()["suggestions"]
    assert suggestions[0].startswith("On a scale of 1 to 10")


# --- scenario ---

def test_scenario_get_put_and_event(gateway):
    current = gateway.get("/scenario").json()
    assert current["name"] == "tour_guide"
    doc = json.loads(open("scenarios/mental_health.json").read())
    assert gateway.put("/scenario", json=doc).status_code == 200
    assert gateway.get("/scenario").json()["name"] == "mental_health"
    events = [e for e in replay(gateway.runtime.recorder.directory) if e.kind is EventKind.SCENARIO]
    assert any(e.payload.get("action") == "swap" for e in events)


def test_scenario_invalid_400(gateway):
    assert gateway.put("/scenario", json={"name": ""}).status_code == 400
    bad = {"name": "x", "provider": "ghost"}
    assert gateway.put("/scenario", json=bad).status_code == 400


# --- annotation and event query ---

def test_annotate_and_event_filtering(gateway):
    gateway.post("/annotate", json={"text": "user seemed curious"})
    pid = confirm_person(gateway)
    gateway.post("/annotate", json={"text": "asked about the arm", "person_id": pid})
    events = gateway.get("/events", params={"person": pid}).json()["events"]
    assert any(e["note"] == "asked about the arm" for e in events)
    notes = [e for e in gateway.get("/events").json()["events"] if e["note"]]
    assert len(notes) == 2


# --- map ---

def test_map_png_builds_from_live_scans(gateway):
    r = gateway.get("/map.png")
    assert r.status_code == 200
    assert r.content.startswith(b"\x89PNG")
    wait_until(lambda: gateway.get("/state/frame").json()["map_version"] > 0, timeout=8.0)


def test_healthz(gateway):
    doc = gateway.get("/healthz").json()
    assert doc["ok"] is True and doc["bridge_connected"] is True
