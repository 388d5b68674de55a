"""Deterministic synthetic detection scenarios with ground-truth identities.

Stands in for a camera-side detector: each actor follows an analytic path
and carries a fixed unit embedding, so association behavior can be tested
against known identities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from caris.tracking.tracker import Detection

EMBEDDING_DIM = 128


def actor_embedding(index: int, dim: int = EMBEDDING_DIM) -> np.ndarray:
    """Mutually orthogonal unit embeddings, one per actor."""
    e = np.zeros(dim)
    e[index % dim] = 1.0
    return e


@dataclass(frozen=True)
class ActorTrace:
    """Ground truth for one actor: bbox per frame (None while absent)."""

    actor_id: int
    boxes: tuple  # tuple[Optional[Bbox], ...]
    embedding: np.ndarray


def _linear_boxes(start, end, n_frames, size=(60.0, 120.0)):
    (x0, y0), (x1, y1) = start, end
    w, h = size
    boxes = []
    for k in range(n_frames):
        a = k / max(1, n_frames - 1)
        boxes.append((x0 + a * (x1 - x0), y0 + a * (y1 - y0), w, h))
    return tuple(boxes)


def crossing_scene(n_frames: int = 40) -> list[ActorTrace]:
    """Two actors walking through each other's path in opposite directions."""
    return [
        ActorTrace(0, _linear_boxes((100.0, 240.0), (540.0, 240.0), n_frames), actor_embedding(0)),
        ActorTrace(1, _linear_boxes((540.0, 240.0), (100.0, 240.0), n_frames), actor_embedding(1)),
    ]


def leave_return_scene(
    present: int = 12, absent: int = 40, returned: int = 12
) -> list[ActorTrace]:
    """One actor walks out of frame and comes back elsewhere, same appearance."""
    walk_out = _linear_boxes((120.0, 220.0), (200.0, 220.0), present)
    walk_back = _linear_boxes((420.0, 260.0), (360.0, 260.0), returned)
    boxes = walk_out + (None,) * absent + walk_back
    return [ActorTrace(0, boxes, actor_embedding(0))]


def detections_for_frame(traces: list[ActorTrace], frame_index: int, frame_id: int) -> list[Detection]:
    dets = []
    for trace in traces:
        box = trace.boxes[frame_index] if frame_index < len(trace.boxes) else None
        if box is None:
            continue
        dets.append(
            Detection(frame_id=frame_id, bbox=box, confidence=0.9, embedding=trace.embedding)
        )
    return dets


def scene_length(traces: list[ActorTrace]) -> int:
    return max(len(t.boxes) for t in traces)
