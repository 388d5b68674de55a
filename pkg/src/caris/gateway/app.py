"""The unified HTTP/WebSocket surface the wizard console drives."""

from __future__ import annotations

import asyncio
import base64
import binascii
import contextlib
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles

from caris.bridge.teleop import TeleopLimits, teleop_to_twist
from caris.conversation.suggestions import suggest_prompts
from caris.conversation.templates import Template, render_template
from caris.errors import (
    AdapterUnavailable,
    DisabledByScenario,
    Disconnected,
    EmptyLabel,
    EmptyPrompt,
    ImagesUnsupported,
    InvalidImage,
    MissingVar,
    NonMonotonicFrame,
    ProviderUnavailable,
    UnknownPerson,
)
from caris.gateway.schemas import (
    AnnotateRequest,
    CompleteRequest,
    DetectionBatch,
    GroupRequest,
    RenameRequest,
    RoleRequest,
    SnapshotRequest,
    SpeakRequest,
    SttRequest,
    TeleopRequest,
)
from caris.gateway.state import GatewaySettings, Runtime
from caris.gateway.video import JPEG_MAGIC, MJPEG_BOUNDARY
from caris.recorder.events import EventKind
from caris.recorder.session import replay
from caris.scenario import ScenarioConfig
from caris.tracking.tracker import Detection

STATE_STREAM_INTERVAL_S = 0.05  # 20 Hz target, comfortably above the 10 Hz floor


def _error(status: int, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail})


def create_app(settings: GatewaySettings, console_dir: Path | None = None) -> FastAPI:
    runtime = Runtime(settings)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        await runtime.start()
        yield
        await runtime.stop()

    app = FastAPI(title="caris gateway", lifespan=lifespan)
    app.state.runtime = runtime

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return _error(400, str(exc.errors()[:3]))

    # --- teleoperation ---

    @app.post("/teleop", status_code=202)
    async def teleop(req: TeleopRequest):
        limits = TeleopLimits(
            runtime.scenario.teleop.max_linear, runtime.scenario.teleop.max_angular
        )
        twist = teleop_to_twist(req.command, req.scale, limits)
        try:
            bridge = await runtime.ensure_bridge()
            await bridge.publish_twist(twist)
        except Disconnected as e:
            return _error(503, str(e))
        runtime.recorder.record(
            EventKind.TELEOP,
            {
                "command": req.command.value,
                "scale": req.scale,
                "linear": twist.linear,
                "angular": twist.angular,
            },
        )
        return {"ok": True, "linear": twist.linear, "angular": twist.angular}

    # --- live state stream ---

    @app.websocket("/state")
    async def state_stream(ws: WebSocket):
        await ws.accept()
        try:
            while True:
                await ws.send_json(await runtime.state_frame())
                await asyncio.sleep(STATE_STREAM_INTERVAL_S)
        except WebSocketDisconnect:
            pass

    @app.get("/state/frame")
    async def state_once():
        return await runtime.state_frame()

    # --- video and perception ingestion ---

    @app.get("/video")
    async def video():
        async def views():
            return (await runtime.tracker_snapshot()).tracks

        return StreamingResponse(
            runtime.video.mjpeg_stream(views),
            media_type=f"multipart/x-mixed-replace; boundary={MJPEG_BOUNDARY}",
        )

    @app.post("/frames", status_code=202)
    async def push_frame(request: Request, frame_id: int):
        body = await request.body()
        if not body.startswith(JPEG_MAGIC):
            return _error(400, "body must be a JPEG image")
        try:
            runtime.video.push_frame(frame_id, body)
        except ValueError as e:
            return _error(409, str(e))
        runtime.recorder.record(
            EventKind.TRACK, {"action": "frame", "frame_id": frame_id, "bytes": len(body)}
        )
        return {"ok": True, "frame_id": frame_id}

    @app.post("/detections", status_code=202)
    async def push_detections(batch: DetectionBatch):
        try:
            detections = [
                Detection(
                    frame_id=batch.frame_id,
                    bbox=tuple(d.bbox),
                    confidence=d.confidence,
                    embedding=np.asarray(d.embedding),
                )
                for d in batch.detections
            ]
        except ValueError as e:
            return _error(400, str(e))
        async with runtime.tracker_lock:
            try:
                snapshot = runtime.tracker.step(batch.frame_id, detections)
            except NonMonotonicFrame as e:
                return _error(409, str(e))
        runtime.recorder.record(
            EventKind.TRACK,
            {
                "action": "detections",
                "frame_id": batch.frame_id,
                "received": len(detections),
                "confirmed": [t.track_id for t in snapshot.tracks],
            },
        )
        return {"ok": True, "confirmed": [t.track_id for t in snapshot.tracks]}

    # --- person registry ---

    @app.get("/persons")
    async def persons():
        return [
            {
                "person_id": r.person_id,
                "label": r.label,
                "group": r.group,
                "linked_tracks": sorted(r.linked_tracks),
                "history_length": len(r.history),
            }
            for r in runtime.registry.persons()
        ]

    @app.post("/persons/{person_id}/rename")
    async def rename_person(person_id: int, req: RenameRequest):
        async with runtime.tracker_lock:
            try:
                record = runtime.registry.label_person(person_id, req.label)
            except UnknownPerson as e:
                return _error(404, str(e))
            except EmptyLabel as e:
                return _error(400, str(e))
        runtime.recorder.record(
            EventKind.REGISTRY,
            {"action": "rename", "label": record.label},
            person_id=person_id,
        )
        return {"ok": True, "person_id": person_id, "label": record.label}

    @app.post("/persons/group")
    async def group_persons(req: GroupRequest):
        async with runtime.tracker_lock:
            try:
                records = runtime.registry.group_persons(req.ids, req.group)
            except UnknownPerson as e:
                return _error(404, str(e))
        event = runtime.recorder.record(
            EventKind.REGISTRY, {"action": "group", "ids": req.ids, "group": req.group}
        )
        for record in records:
            runtime.registry.attach_event(record.person_id, event)
        return {"ok": True, "group": req.group, "ids": req.ids}

    @app.get("/persons/{person_id}/history")
    async def person_history(person_id: int):
        try:
            history = runtime.registry.person_history(person_id)
        except UnknownPerson as e:
            return _error(404, str(e))
        return {
            "person_id": person_id,
            "events": [
                {
                    "seq": e.seq,
                    "t_ms": e.t_ms,
                    "kind": e.kind.value,
                    "payload": e.payload,
                    "note": e.note,
                }
                for e in history
            ],
        }

    # --- snapshots ---

    @app.post("/snapshot")
    async def snapshot(req: SnapshotRequest):
        try:
            png = runtime.video.snapshot_png()
        except LookupError as e:
            return _error(400, str(e))
        try:
            path = runtime.recorder.record_snapshot(png, req.person_id, req.note)
        except DisabledByScenario as e:
            return _error(403, str(e))
        except InvalidImage as e:
            return _error(400, str(e))
        return {"ok": True, "path": str(path.relative_to(runtime.recorder.directory))}

    # --- conversation ---

    @app.post("/llm/complete")
    async def llm_complete(req: CompleteRequest):
        if not runtime.scenario.enabled_features.llm:
            return _error(403, "LLM use is disabled by the active scenario")
        prompt = req.prompt
        if req.template_id is not None:
            spec = runtime.scenario.template(req.template_id)
            if spec is None:
                return _error(404, f"unknown template {req.template_id!r}")
            try:
                prompt = render_template(
                    Template(spec.template_id, spec.body, tuple(spec.required_vars)),
                    req.vars,
                )
            except MissingVar as e:
                return _error(400, str(e))
        image = None
        if req.image_b64 is not None:
            try:
                image = base64.b64decode(req.image_b64, validate=True)
            except (binascii.Error, ValueError):
                return _error(400, "image_b64 is not valid base64")
        try:
            exchange = await runtime.conversation.complete(
                prompt or "", provider_name=req.provider, image=image, person_id=req.person_id
            )
        except EmptyPrompt as e:
            return _error(400, str(e))
        except ImagesUnsupported as e:
            return _error(400, str(e))
        except ProviderUnavailable as e:
            return _error(502, str(e))
        runtime.last_utterance = exchange.response
        return {
            "exchange_id": exchange.exchange_id,
            "response": exchange.response,
            "error": exchange.error,
            "latency_ms": exchange.latency_ms,
            "provider": exchange.provider,
            "model": exchange.model,
        }

    @app.post("/speak")
    async def speak(req: SpeakRequest):
        try:
            await runtime.ensure_bridge()
            handle = await runtime.speech.speak(req.text, req.person_id, req.note)
        except DisabledByScenario as e:
            return _error(403, str(e))
        except (Disconnected, AdapterUnavailable) as e:
            return _error(503, str(e))
        runtime.last_utterance = req.text
        runtime.conversation.add_utterance("wizard", req.text)
        return {"ok": True, "topic": handle.topic, "text": handle.text}

    @app.post("/stt")
    async def stt(req: SttRequest):
        try:
            audio = base64.b64decode(req.audio_b64, validate=True)
        except (binascii.Error, ValueError):
            return _error(400, "audio_b64 is not valid base64")
        try:
            text = runtime.speech.transcribe(audio, source=req.source)
        except DisabledByScenario as e:
            return _error(403, str(e))
        except AdapterUnavailable as e:
            return _error(503, str(e))
        runtime.conversation.add_utterance("user", text)
        return {"text": text}

    @app.post("/role")
    async def set_role(req: RoleRequest):
        runtime.conversation.set_role(req.role)
        return {"ok": True, "role": req.role}

    @app.get("/suggestions")
    async def suggestions():
        return {
            "suggestions": suggest_prompts(
                runtime.scenario, runtime.conversation.recent_transcript()
            )
        }

    # --- scenario ---

    @app.get("/scenario")
    async def get_scenario():
        return runtime.scenario.model_dump()

    @app.put("/scenario")
    async def put_scenario(doc: dict):
        try:
            scenario = ScenarioConfig.model_validate(doc)
        except ValueError as e:
            return _error(400, f"invalid scenario: {e}")
        runtime.swap_scenario(scenario)
        return {"ok": True, "name": scenario.name}

    # --- annotation and session data ---

    @app.post("/annotate")
    async def annotate(req: AnnotateRequest):
        kind = EventKind.REGISTRY if req.person_id is not None else EventKind.SCENARIO
        event = runtime.recorder.record(
            kind, {"action": "note"}, person_id=req.person_id, note=req.text
        )
        return {"ok": True, "seq": event.seq}

    @app.get("/events")
    async def events(kind: str | None = None, person: int | None = None, limit: int = 200):
        out = []
        for event in replay(runtime.recorder.directory):
            if kind is not None and event.kind.value != kind:
                continue
            if person is not None and event.person_id != person:
                continue
            out.append(
                {
                    "seq": event.seq,
                    "t_ms": event.t_ms,
                    "kind": event.kind.value,
                    "payload": event.payload,
                    "person_id": event.person_id,
                    "note": event.note,
                }
            )
        return {"events": out[-limit:]}

    # --- map ---

    @app.get("/map.png")
    async def map_png():
        png = await asyncio.to_thread(runtime.mapper.render_png)
        return Response(content=png, media_type="image/png")

    @app.get("/healthz")
    async def healthz():
        return {
            "ok": True,
            "bridge_connected": runtime.bridge is not None and runtime.bridge.connected,
            "scenario": runtime.scenario.name,
            "session_dir": str(runtime.recorder.directory),
        }

    # --- console ---

    if console_dir is not None and console_dir.exists():
        app.mount("/static", StaticFiles(directory=console_dir), name="static")
        index = console_dir / "index.html"

        @app.get("/", response_class=HTMLResponse)
        async def console_index():
            return FileResponse(index)

    else:

        @app.get("/", response_class=HTMLResponse)
        async def placeholder_index():
            return HTMLResponse(
                "<html><body><h1>caris gateway</h1>"
                "<p>No console build found. The API is live; see /docs.</p></body></html>"
            )

    return app
