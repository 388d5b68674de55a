"""Request/response models for the gateway API."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field

from caris.bridge.teleop import TeleopCommand


class TeleopRequest(BaseModel):
    command: TeleopCommand
    scale: float = Field(default=1.0, ge=0.0, le=1.0)


class DetectionIn(BaseModel):
    bbox: list[float] = Field(min_length=4, max_length=4)  # cx, cy, w, h
    confidence: float = Field(ge=0.0, le=1.0)
    embedding: list[float]


class DetectionBatch(BaseModel):
    frame_id: int
    detections: list[DetectionIn] = Field(default_factory=list)


class RenameRequest(BaseModel):
    label: str


class GroupRequest(BaseModel):
    ids: list[int]
    group: str


class SnapshotRequest(BaseModel):
    person_id: Optional[int] = None
    note: Optional[str] = None


class CompleteRequest(BaseModel):
    prompt: Optional[str] = None
    template_id: Optional[str] = None
    vars: dict[str, Any] = Field(default_factory=dict)
    provider: Optional[str] = None
    image_b64: Optional[str] = None
    person_id: Optional[int] = None
    note: Optional[str] = None


class SpeakRequest(BaseModel):
    text: str
    person_id: Optional[int] = None
    note: Optional[str] = None


class SttRequest(BaseModel):
    audio_b64: str
    source: str = "user"


class RoleRequest(BaseModel):
    role: str


class AnnotateRequest(BaseModel):
    text: str
    person_id: Optional[int] = None


class TrackOut(BaseModel):
    track_id: int
    person_id: Optional[int]
    label: str
    bbox: list[float]


class PoseOut(BaseModel):
    x: float
    y: float
    theta: float


class StateFrame(BaseModel):
    timestamp: float
    pose: PoseOut
    tracks: list[TrackOut]
    map_version: int
    last_utterance: Optional[str]
    active_scenario: str


class PersonOut(BaseModel):
    person_id: int
    label: str
    group: Optional[str]
    linked_tracks: list[int]
    history_length: int


class ExchangeOut(BaseModel):
    exchange_id: str
    response: Optional[str]
    error: Optional[str]
    latency_ms: int
    provider: str
    model: str
