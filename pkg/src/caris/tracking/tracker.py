"""Tracking-by-detection: gated assignment over Kalman-predicted tracks.

A single matching pass combines box overlap and appearance distance,
gated by both an appearance threshold and a chi-square Mahalanobis bound.
Simpler than age-cascaded matching and equivalent at room scale.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from caris.errors import NonMonotonicFrame
from caris.tracking.assignment import Bbox, hungarian, iou, max_gallery_similarity
from caris.tracking.kalman import gating_distance, initiate, kf_predict, kf_update

# 0.95 chi-square quantile at 4 degrees of freedom: the Mahalanobis gate
# for a 4-vector box measurement.
CHI2_GATE_4DOF = 9.4877


@dataclass(frozen=True)
class Detection:
    frame_id: int
    bbox: Bbox
    confidence: float
    embedding: np.ndarray

    def __post_init__(self):
        cx, cy, w, h = self.bbox
        if w <= 0 or h <= 0:
            raise ValueError("detection box must have positive extents")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")
        emb = np.asarray(self.embedding, dtype=np.float64)
        norm = float(np.linalg.norm(emb))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError("embedding must be unit-norm")
        object.__setattr__(self, "embedding", emb)
        object.__setattr__(self, "bbox", tuple(float(v) for v in self.bbox))

    def measurement(self) -> np.ndarray:
        cx, cy, w, h = self.bbox
        return np.array([cx, cy, w / h, h])


class TrackStatus(Enum):
    TENTATIVE = "tentative"
    CONFIRMED = "confirmed"
    DELETED = "deleted"


@dataclass(frozen=True)
class TrackerParams:
    lambda_weight: float = 0.5   # overlap-vs-appearance mix in the cost
    tau_app: float = 0.4         # appearance gate
    cost_max: float = 0.7        # matches costlier than this are dropped
    tau_reid: float = 0.8        # gallery similarity needed to re-link a person
    n_init: int = 3              # consecutive hits before a track is confirmed
    max_age: int = 30            # missed frames tolerated for a confirmed track
    gallery_size: int = 50
    gate_chi2: float = CHI2_GATE_4DOF


class Track:
    def __init__(self, track_id: int, detection: Detection, gallery_size: int):
        self.track_id = track_id
        self.mean, self.cov = initiate(detection.measurement())
        self.status = TrackStatus.TENTATIVE
        self.hits = 1
        self.misses = 0
        self.gallery: deque[np.ndarray] = deque(maxlen=gallery_size)
        self.gallery.append(detection.embedding)
        self.person_id: int | None = None

    @property
    def bbox(self) -> Bbox:
        cx, cy, aspect, h = self.mean[:4]
        return (float(cx), float(cy), float(aspect * h), float(h))

    def predict(self, dt: float) -> None:
        self.mean, self.cov = kf_predict(self.mean, self.cov, dt)

    def update(self, detection: Detection) -> None:
        self.mean, self.cov = kf_update(self.mean, self.cov, detection.measurement())
        self.hits += 1
        self.misses = 0
        self.gallery.append(detection.embedding)

    def mark_missed(self, max_age: int) -> None:
        self.misses += 1
        if self.status is TrackStatus.TENTATIVE or self.misses > max_age:
            self.status = TrackStatus.DELETED


@dataclass(frozen=True)
class TrackView:
    track_id: int
    person_id: int | None
    label: str
    bbox: Bbox


@dataclass(frozen=True)
class TrackerSnapshot:
    frame_id: int
    tracks: tuple[TrackView, ...] = field(default_factory=tuple)

    def to_json(self) -> bytes:
        return json.dumps(
            {
                "frame_id": self.frame_id,
                "tracks": [
                    {
                        "track_id": t.track_id,
                        "person_id": t.person_id,
                        "label": t.label,
                        "bbox": list(t.bbox),
                    }
                    for t in self.tracks
                ],
            },
            separators=(",", ":"),
        ).encode("utf-8")


def associate(
    tracks: list[Track], detections: list[Detection], params: TrackerParams
) -> tuple[list[tuple[int, int]], list[int], list[int]]:
    """Match predicted tracks to detections.

    Cost per pair mixes (1 - iou) with appearance distance; pairs failing
    the appearance or Mahalanobis gate are forbidden. Assignments costlier
    than cost_max fall back to unmatched.
    """
    if not tracks or not detections:
        return [], list(range(len(tracks))), list(range(len(detections)))
    lam = params.lambda_weight
    cost = np.full((len(tracks), len(detections)), math.inf)
    for i, track in enumerate(tracks):
        for j, det in enumerate(detections):
            d_app = 1.0 - max_gallery_similarity(det.embedding, track.gallery)
            if d_app > params.tau_app:
                continue
            if gating_distance(track.mean, track.cov, det.measurement()) > params.gate_chi2:
                continue
            cost[i, j] = lam * (1.0 - iou(track.bbox, det.bbox)) + (1.0 - lam) * d_app
    # Substitute a finite sentinel so gating can never make the full
    # assignment infeasible; sentinel pairs are dropped below.
    sentinel = 2.0 * float(np.abs(cost[np.isfinite(cost)]).sum() if np.isfinite(cost).any() else 0.0) + 1.0
    pairs, _ = hungarian(np.where(np.isinf(cost), sentinel, cost))
    matches = []
    matched_tracks: set[int] = set()
    matched_dets: set[int] = set()
    for i, j in pairs:
        if math.isinf(cost[i, j]) or cost[i, j] > params.cost_max:
            continue
        matches.append((i, j))
        matched_tracks.add(i)
        matched_dets.add(j)
    unmatched_tracks = [i for i in range(len(tracks)) if i not in matched_tracks]
    unmatched_dets = [j for j in range(len(detections)) if j not in matched_dets]
    return matches, unmatched_tracks, unmatched_dets


class PeopleTracker:
    """Owns track lifecycle; optionally links confirmed tracks to a registry."""

    def __init__(self, params: TrackerParams | None = None, registry=None):
        self.params = params or TrackerParams()
        self.registry = registry
        self.tracks: list[Track] = []
        self.last_frame_id: int | None = None
        self._next_track_id = 1

    def step(self, frame_id: int, detections: list[Detection]) -> TrackerSnapshot:
        if self.last_frame_id is not None and frame_id <= self.last_frame_id:
            raise NonMonotonicFrame(
                f"frame {frame_id} not after {self.last_frame_id}"
            )
        dt = 1.0 if self.last_frame_id is None else float(frame_id - self.last_frame_id)
        self.last_frame_id = frame_id

        for track in self.tracks:
            track.predict(dt)

        matches, unmatched_tracks, unmatched_dets = associate(
            self.tracks, detections, self.params
        )
        for i, j in matches:
            self.tracks[i].update(detections[j])
        for i in unmatched_tracks:
            self.tracks[i].mark_missed(self.params.max_age)
        for j in unmatched_dets:
            self.tracks.append(
                Track(self._next_track_id, detections[j], self.params.gallery_size)
            )
            self._next_track_id += 1

        for track in self.tracks:
            if track.status is TrackStatus.TENTATIVE and track.hits >= self.params.n_init:
                track.status = TrackStatus.CONFIRMED
                if self.registry is not None:
                    track.person_id = self.registry.reidentify(
                        track.gallery, self.params.tau_reid, track.track_id
                    )
        self.tracks = [t for t in self.tracks if t.status is not TrackStatus.DELETED]
        return self.snapshot(frame_id)

    def snapshot(self, frame_id: int) -> TrackerSnapshot:
        views = []
        for t in self.tracks:
            if t.status is not TrackStatus.CONFIRMED:
                continue
            label = f"track-{t.track_id}"
            if t.person_id is not None and self.registry is not None:
                label = self.registry.get(t.person_id).label
            views.append(TrackView(t.track_id, t.person_id, label, t.bbox))
        return TrackerSnapshot(frame_id=frame_id, tracks=tuple(views))
