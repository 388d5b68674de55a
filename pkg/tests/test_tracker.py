import numpy as np
import pytest

from caris.errors import NonMonotonicFrame
from caris.tracking.registry import PersonRegistry
from caris.tracking.synthetic import (
    actor_embedding,
    crossing_scene,
    detections_for_frame,
    leave_return_scene,
    scene_length,
)
from caris.tracking.tracker import (
    Detection,
    PeopleTracker,
    TrackStatus,
    TrackerParams,
    associate,
)


def det(frame_id, cx, cy, w=60.0, h=120.0, actor=0, conf=0.9):
    return Detection(frame_id, (cx, cy, w, h), conf, actor_embedding(actor))


def run_frames(tracker, frames):
    """frames: list of detection lists; returns list of snapshots."""
    return [tracker.step(i + 1, dets) for i, dets in enumerate(frames)]


def test_single_detection_spawns_tentative_track():
    tracker = PeopleTracker()
    snapshot = tracker.step(1, [det(1, 100, 100)])
    assert len(tracker.tracks) == 1
    assert tracker.tracks[0].status is TrackStatus.TENTATIVE
    assert snapshot.tracks == ()  # tentative tracks are not exposed


def test_track_confirms_after_n_init_consecutive_hits():
    tracker = PeopleTracker(TrackerParams(n_init=3))
    run_frames(tracker, [[det(i, 100 + i, 100)] for i in range(1, 3)])
    assert tracker.tracks[0].status is TrackStatus.TENTATIVE
    snapshot = tracker.step(3, [det(3, 103, 100)])
    assert tracker.tracks[0].status is TrackStatus.CONFIRMED
    assert len(snapshot.tracks) == 1


def test_tentative_track_dies_on_first_miss():
    tracker = PeopleTracker()
    tracker.step(1, [det(1, 100, 100)])
    tracker.step(2, [])
    assert tracker.tracks == []


def test_confirmed_track_survives_max_age_then_dies():
    params = TrackerParams(n_init=2, max_age=5)
    tracker = PeopleTracker(params)
    run_frames(tracker, [[det(i, 100, 100)] for i in range(1, 3)])
    track = tracker.tracks[0]
    assert track.status is TrackStatus.CONFIRMED
    frame = 3
    for _ in range(params.max_age):  # misses reach max_age: still alive
        tracker.step(frame, [])
        frame += 1
    assert tracker.tracks and tracker.tracks[0].misses == params.max_age
    tracker.step(frame, [])  # misses exceed max_age: deleted
    assert tracker.tracks == []


def test_track_ids_strictly_increasing_never_reused():
    tracker = PeopleTracker(TrackerParams(n_init=1, max_age=0))
    seen = []
    for frame in range(1, 20, 2):
        tracker.step(frame, [det(frame, 50.0 + 40 * frame, 100, actor=frame % 5)])
        seen.append(tracker.tracks[-1].track_id)
        tracker.step(frame + 1, [])  # kill it
    assert seen == sorted(set(seen))


def test_frame_ids_must_increase():
    tracker = PeopleTracker()
    tracker.step(5, [])
    with pytest.raises(NonMonotonicFrame):
        tracker.step(5, [])
    with pytest.raises(NonMonotonicFrame):
        tracker.step(4, [])


def test_associate_matches_detection_at_prediction():
    tracker = PeopleTracker()
    tracker.step(1, [det(1, 100, 100)])
    track = tracker.tracks[0]
    track.predict(1.0)
    matches, unmatched_tracks, unmatched_dets = associate(
        [track], [det(2, 100, 100)], tracker.params
    )
    assert matches == [(0, 0)]
    assert unmatched_tracks == [] and unmatched_dets == []


def test_associate_gates_orthogonal_embedding():
    tracker = PeopleTracker(TrackerParams(tau_app=0.4))
    tracker.step(1, [det(1, 100, 100, actor=0)])
    track = tracker.tracks[0]
    track.predict(1.0)
    stranger = det(2, 100, 100, actor=1)  # d_app = 1 > tau_app
    matches, unmatched_tracks, unmatched_dets = associate([track], [stranger], tracker.params)
    assert matches == []
    assert unmatched_tracks == [0] and unmatched_dets == [0]


def test_at_most_one_match_per_track_and_detection():
    rng = np.random.default_rng(8)
    tracker = PeopleTracker(TrackerParams(n_init=1))
    for frame in range(1, 30):
        dets = [
            det(frame, 100 + 30 * a + float(rng.uniform(-3, 3)), 100, actor=a)
            for a in range(4)
        ]
        tracker.step(frame, dets)
        ids = [t.track_id for t in tracker.tracks]
        assert len(ids) == len(set(ids))
    assert len(tracker.tracks) == 4


def identity_switches(traces, snapshots, start_frame=5):
    """Count changes in the actor -> track_id association over time."""
    assignment = {}
    switches = 0
    for snap in snapshots:
        if snap.frame_id < start_frame or not snap.tracks:
            continue
        idx = snap.frame_id - 1
        for trace in traces:
            box = trace.boxes[idx] if idx < len(trace.boxes) else None
            if box is None:
                continue
            nearest = min(
                snap.tracks,
                key=lambda t: (t.bbox[0] - box[0]) ** 2 + (t.bbox[1] - box[1]) ** 2,
            )
            previous = assignment.get(trace.actor_id)
            if previous is not None and previous != nearest.track_id:
                switches += 1
            assignment[trace.actor_id] = nearest.track_id
    return switches


def test_crossing_scene_zero_identity_switches():
    traces = crossing_scene(n_frames=40)
    tracker = PeopleTracker()
    snapshots = [
        tracker.step(i + 1, detections_for_frame(traces, i, i + 1))
        for i in range(scene_length(traces))
    ]
    assert identity_switches(traces, snapshots) == 0
    final = snapshots[-1]
    assert len(final.tracks) == 2


def test_leave_and_return_relinks_same_person():
    registry = PersonRegistry()
    tracker = PeopleTracker(registry=registry)
    traces = leave_return_scene(present=12, absent=40, returned=12)
    persons_seen = []
    for i in range(scene_length(traces)):
        tracker.step(i + 1, detections_for_frame(traces, i, i + 1))
        for t in tracker.tracks:
            if t.person_id is not None:
                persons_seen.append((i, t.track_id, t.person_id))
    track_ids = {tid for _, tid, _ in persons_seen}
    person_ids = {pid for _, _, pid in persons_seen}
    assert len(track_ids) == 2, "the absence must be long enough to kill the first track"
    assert len(person_ids) == 1, "re-identification must link back to the same person"
    assert len(registry) == 1


def test_snapshot_stream_deterministic():
    traces = crossing_scene(n_frames=25)

    def run():
        tracker = PeopleTracker()
        blobs = []
        for i in range(scene_length(traces)):
            snap = tracker.step(i + 1, detections_for_frame(traces, i, i + 1))
            blobs.append(snap.to_json())
        return b"".join(blobs)

    assert run() == run()


def test_detection_validation():
    with pytest.raises(ValueError):
        Detection(1, (0, 0, -1, 5), 0.5, actor_embedding(0))
    with pytest.raises(ValueError):
        Detection(1, (0, 0, 1, 5), 1.5, actor_embedding(0))
    with pytest.raises(ValueError):
        Detection(1, (0, 0, 1, 5), 0.5, np.ones(128))  # not unit norm
