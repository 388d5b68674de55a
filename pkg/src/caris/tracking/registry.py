"""Named, groupable person records with appearance galleries and histories."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from caris.errors import EmptyLabel, UnknownPerson
from caris.tracking.assignment import max_gallery_similarity


@dataclass
class PersonRecord:
    person_id: int
    label: str
    group: str | None = None
    linked_tracks: set[int] = field(default_factory=set)
    gallery: list[np.ndarray] = field(default_factory=list)
    history: list = field(default_factory=list)  # SessionEvent references, append order


class PersonRegistry:
    def __init__(self, gallery_cap: int = 200):
        self._persons: dict[int, PersonRecord] = {}
        self._next_id = 1
        self._gallery_cap = gallery_cap

    def __len__(self) -> int:
        return len(self._persons)

    def persons(self) -> list[PersonRecord]:
        return [self._persons[pid] for pid in sorted(self._persons)]

    def get(self, person_id: int) -> PersonRecord:
        try:
            return self._persons[person_id]
        except KeyError:
            raise UnknownPerson(f"no person with id {person_id}") from None

    def create_person(self, track_id: int | None = None) -> PersonRecord:
        pid = self._next_id
        self._next_id += 1
        record = PersonRecord(person_id=pid, label=f"person-{pid}")
        if track_id is not None:
            record.linked_tracks.add(track_id)
        self._persons[pid] = record
        return record

    def reidentify(self, gallery, tau_reid: float, track_id: int) -> int:
        """Link a freshly confirmed track to the best-matching person.

        The person whose gallery holds the highest cosine similarity to any
        of the track's embeddings wins, provided it clears tau_reid;
        otherwise a new record is created.
        """
        best_pid, best_sim = None, -1.0
        for record in self._persons.values():
            for emb in gallery:
                sim = max_gallery_similarity(emb, record.gallery)
                if sim > best_sim:
                    best_pid, best_sim = record.person_id, sim
        if best_pid is not None and best_sim >= tau_reid:
            record = self._persons[best_pid]
        else:
            record = self.create_person()
        record.linked_tracks.add(track_id)
        for emb in gallery:
            record.gallery.append(np.asarray(emb))
        del record.gallery[: max(0, len(record.gallery) - self._gallery_cap)]
        return record.person_id

    def label_person(self, person_id: int, label: str) -> PersonRecord:
        if not label:
            raise EmptyLabel("person label must be non-empty")
        record = self.get(person_id)
        record.label = label
        return record

    def group_persons(self, person_ids, group: str) -> list[PersonRecord]:
        records = [self.get(pid) for pid in person_ids]
        for record in records:
            record.group = group
        return records

    def attach_event(self, person_id: int, event) -> None:
        self.get(person_id).history.append(event)

    def person_history(self, person_id: int) -> list:
        return list(self.get(person_id).history)

    # --- gallery persistence (per session directory) ---

    def save_galleries(self, path: str | Path) -> None:
        path = Path(path)
        payload = {
            str(pid): {
                "label": rec.label,
                "group": rec.group,
                "linked_tracks": sorted(rec.linked_tracks),
                "gallery": [e.tolist() for e in rec.gallery],
            }
            for pid, rec in self._persons.items()
        }
        path.write_text(json.dumps(payload), encoding="utf-8")

    @classmethod
    def load_galleries(cls, path: str | Path) -> "PersonRegistry":
        registry = cls()
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        for pid_str, rec in sorted(payload.items(), key=lambda kv: int(kv[0])):
            pid = int(pid_str)
            record = PersonRecord(
                person_id=pid,
                label=rec["label"],
                group=rec.get("group"),
                linked_tracks=set(rec.get("linked_tracks", [])),
                gallery=[np.asarray(e) for e in rec.get("gallery", [])],
            )
            registry._persons[pid] = record
            registry._next_id = max(registry._next_id, pid + 1)
        return registry
