from caris.tracking.assignment import hungarian, iou
from caris.tracking.kalman import (
    KalmanParams,
    gating_distance,
    initiate,
    kf_predict,
    kf_update,
)
from caris.tracking.tracker import (
    Detection,
    PeopleTracker,
    Track,
    TrackStatus,
    TrackerParams,
    TrackerSnapshot,
    associate,
)
from caris.tracking.registry import PersonRecord, PersonRegistry

__all__ = [
    "hungarian",
    "iou",
    "KalmanParams",
    "initiate",
    "kf_predict",
    "kf_update",
    "gating_distance",
    "Detection",
    "Track",
    "TrackStatus",
    "TrackerParams",
    "TrackerSnapshot",
    "PeopleTracker",
    "associate",
    "PersonRecord",
    "PersonRegistry",
]
