"""Plate-to-make-model registry and the fraud verdict rule.

A verdict is decided in strict precedence: a prediction below the
confidence floor is ``low_confidence`` (routed to review, never declared
fraud); an unknown plate is ``unregistered``; a known plate whose
registered class matches the predicted class is ``authorized``; a known
plate with a different class is ``fraud`` — the recurrent-plate case the
middleware exists to catch.
"""

from __future__ import annotations

import csv
import json
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..classifier.network import ClassScores
from ..labels import is_valid_class_id

DEFAULT_CONFIDENCE_FLOOR = 0.8

_PLATE_JUNK = re.compile(r"[^0-9A-Z]")


def normalize_plate(plate: str) -> str:
    """Uppercase and strip separators: '16 abc-123' -> '16ABC123'."""
    return _PLATE_JUNK.sub("", plate.upper())


@dataclass(frozen=True)
class RegistryEntry:
    plate: str  # normalized key
    class_id: int

    def __post_init__(self):
        if not self.plate:
            raise ValueError("empty plate")
        if self.plate != normalize_plate(self.plate):
            raise ValueError(f"plate {self.plate!r} is not normalized")
        if not is_valid_class_id(self.class_id):
            raise ValueError(f"unknown class_id {self.class_id}")


@dataclass(frozen=True)
class Observation:
    plate: str
    predicted: ClassScores
    timestamp: float = field(default_factory=time.time)
    camera_id: str = ""

    def as_json(self) -> dict:
        return {
            "plate": self.plate,
            "predicted": self.predicted.as_json(),
            "timestamp": self.timestamp,
            "camera_id": self.camera_id,
        }


VERDICT_STATUSES = ("authorized", "fraud", "unregistered", "low_confidence")


@dataclass(frozen=True)
class Verdict:
    status: str
    observation: Observation
    top_class: int
    top_prob: float
    matched_entry: RegistryEntry | None = None

    def __post_init__(self):
        if self.status not in VERDICT_STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == "fraud":
            if self.matched_entry is None or self.matched_entry.class_id == self.top_class:
                raise ValueError("fraud verdict requires a matched entry of a different class")

    def as_json(self) -> dict:
        return {
            "status": self.status,
            "observation": self.observation.as_json(),
            "top_class": self.top_class,
            "top_prob": self.top_prob,
            "matched_entry": None
            if self.matched_entry is None
            else {"plate": self.matched_entry.plate, "class_id": self.matched_entry.class_id},
        }


class Registry:
    """Plate -> class bindings with atomic snapshot reads.

    Mutations are serialized and replace the snapshot wholesale, so
    concurrent evaluations see a consistent registry.
    """

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.Lock()
        self._entries: dict[str, RegistryEntry] = {}
        self._path = Path(path) if path is not None else None
        self.supersessions: list[tuple[RegistryEntry, RegistryEntry]] = []
        if self._path is not None and self._path.is_file():
            self._load()

    def register(self, plate: str, class_id: int) -> RegistryEntry:
        """Upsert a plate binding; identical re-registration is a no-op,
        a class change supersedes (and is recorded)."""
        key = normalize_plate(plate)
        entry = RegistryEntry(key, class_id)  # validates plate and class
        with self._lock:
            old = self._entries.get(key)
            if old is not None and old.class_id != class_id:
                self.supersessions.append((old, entry))
            snapshot = dict(self._entries)
            snapshot[key] = entry
            self._entries = snapshot
            self._save()
        return entry

    def lookup(self, plate: str) -> RegistryEntry | None:
        return self._entries.get(normalize_plate(plate))

    def snapshot(self) -> dict[str, RegistryEntry]:
        return self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def _save(self) -> None:
        if self._path is None:
            return
        tmp = self._path.with_suffix(".tmp")
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["plate", "class_id"])
            for entry in sorted(self._entries.values(), key=lambda e: e.plate):
                writer.writerow([entry.plate, entry.class_id])
        tmp.replace(self._path)

    def _load(self) -> None:
        with open(self._path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["plate", "class_id"]:
                raise ValueError(f"bad registry header {header!r}")
            for plate, class_id in reader:
                self._entries[plate] = RegistryEntry(plate, int(class_id))


def evaluate(
    observation: Observation,
    registry: Registry,
    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR,
) -> Verdict:
    """Decide one observation against a registry snapshot."""
    top_class = observation.predicted.top_class
    top_prob = observation.predicted.top_prob
    entry = registry.lookup(observation.plate)
    if top_prob < confidence_floor:
        status = "low_confidence"
    elif entry is None:
        status = "unregistered"
    elif entry.class_id == top_class:
        status = "authorized"
    else:
        status = "fraud"
    return Verdict(status, observation, top_class, top_prob, matched_entry=entry)


class AuditLog:
    """Append-only JSON-lines log of verdicts (fraud claims need a trail)."""

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._lock = threading.Lock()
        self._path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, verdict: Verdict) -> None:
        line = json.dumps(verdict.as_json(), sort_keys=True)
        with self._lock, open(self._path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    def read_all(self) -> list[dict]:
        if not self._path.is_file():
            return []
        with open(self._path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]


class SidecarPlateReader:
    """Deterministic stand-in for an external plate-reading service: the
    plate string lives in ``<image>.plate.txt`` next to the image. Returns
    None (skip) when the sidecar is absent or empty."""

    def __init__(self):
        self.skipped = 0

    def __call__(self, image_path: str | Path) -> str | None:
        sidecar = Path(str(image_path) + ".plate.txt")
        if not sidecar.is_file():
            self.skipped += 1
            return None
        text = sidecar.read_text(encoding="utf-8").strip()
        if not text:
            self.skipped += 1
            return None
        return text
