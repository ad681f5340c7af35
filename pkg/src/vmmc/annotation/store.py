"""Annotation rows, the human-review queue, and their persistent store.

Every image that enters a campaign ends in exactly one of three states:
an auto row (detector box accepted), a human row (annotator labeled it),
or deleted. The store keeps that conservation law, serializes review
state transitions, and persists to a rows CSV (manifest schema) plus a
review-queue JSON so campaigns survive process restarts.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..boxes import BoundingBox
from ..labels import is_valid_class_id
from .. import dataset


class DecisionError(ValueError):
    """Decision applied to an item that is not pending."""


@dataclass(frozen=True)
class DetectionCandidate:
    bbox: BoundingBox
    confidence: float
    detector_class: str = "car"

    def __post_init__(self):
        if self.bbox.area <= 0:
            raise ValueError("candidate bbox must have positive area")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")


@dataclass(frozen=True)
class AnnotationRow:
    image_path: str
    class_id: int
    bbox: BoundingBox
    source: str

    def __post_init__(self):
        if not is_valid_class_id(self.class_id):
            raise ValueError(f"unknown class_id {self.class_id}")
        if self.source not in ("auto", "human"):
            raise ValueError(f"source must be auto|human, got {self.source!r}")


@dataclass
class ReviewItem:
    image_path: str
    best_candidate: DetectionCandidate | None = None
    status: str = "pending"
    assigned_class: int | None = None
    item_id: str = field(default_factory=lambda: uuid.uuid4().hex[:12])


@dataclass(frozen=True)
class Label:
    class_id: int
    bbox: BoundingBox


@dataclass(frozen=True)
class Delete:
    pass


Decision = Label | Delete


class AnnotationStore:
    """Single-writer store of annotation rows and review items.

    Pass a directory to persist; in-memory stores are fine for tests.
    All mutations take the store lock, so concurrent review sessions see
    a consistent queue.
    """

    def __init__(self, directory: str | os.PathLike | None = None):
        self._lock = threading.RLock()
        self._rows: dict[str, AnnotationRow] = {}
        self._items: dict[str, ReviewItem] = {}
        self._leases: dict[str, float] = {}
        self._dir = Path(directory) if directory is not None else None
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
            self._load()

    # -- accessors ---------------------------------------------------------

    @property
    def rows(self) -> list[AnnotationRow]:
        with self._lock:
            return list(self._rows.values())

    @property
    def items(self) -> list[ReviewItem]:
        with self._lock:
            return list(self._items.values())

    def item(self, item_id: str) -> ReviewItem:
        with self._lock:
            try:
                return self._items[item_id]
            except KeyError:
                raise KeyError(f"no review item {item_id!r}") from None

    def stats(self) -> dict[str, int]:
        with self._lock:
            counts = {"pending": 0, "labeled": 0, "deleted": 0}
            for it in self._items.values():
                counts[it.status] += 1
            counts["auto_rows"] = sum(1 for r in self._rows.values() if r.source == "auto")
            counts["human_rows"] = sum(1 for r in self._rows.values() if r.source == "human")
            return counts

    # -- mutations ---------------------------------------------------------

    def add_auto_row(self, row: AnnotationRow) -> None:
        if row.source != "auto":
            raise ValueError("add_auto_row takes source=auto rows")
        with self._lock:
            if row.image_path in self._rows:
                raise ValueError(f"duplicate annotation for {row.image_path!r}")
            self._rows[row.image_path] = row
            self._flush()

    def enqueue(self, item: ReviewItem) -> ReviewItem:
        with self._lock:
            if item.image_path in self._rows or any(
                it.image_path == item.image_path and it.status == "pending" for it in self._items.values()
            ):
                raise ValueError(f"{item.image_path!r} already annotated or queued")
            self._items[item.item_id] = item
            self._flush()
            return item

    def apply_decision(self, item: ReviewItem | str, decision: Decision) -> ReviewItem:
        """Resolve a pending item: Label appends a human row, Delete drops
        the image from all manifests. Raises DecisionError on a second
        decision for the same item."""
        with self._lock:
            it = self.item(item) if isinstance(item, str) else self._items.get(item.item_id)
            if it is None:
                raise KeyError("item does not belong to this store")
            if it.status != "pending":
                raise DecisionError(f"item {it.item_id} already {it.status}")
            if isinstance(decision, Label):
                row = AnnotationRow(it.image_path, decision.class_id, decision.bbox, source="human")
                self._rows[it.image_path] = row
                it.status = "labeled"
                it.assigned_class = decision.class_id
            elif isinstance(decision, Delete):
                self._rows.pop(it.image_path, None)
                it.status = "deleted"
            else:
                raise TypeError(f"unknown decision {decision!r}")
            self._leases.pop(it.item_id, None)
            self._flush()
            return it

    def reopen(self, image_path: str) -> ReviewItem:
        """Queue an already-annotated image for human correction; the
        labeling decision then replaces the existing row."""
        with self._lock:
            if image_path not in self._rows:
                raise KeyError(f"no annotation row for {image_path!r}")
            if any(it.image_path == image_path and it.status == "pending" for it in self._items.values()):
                raise ValueError(f"{image_path!r} is already queued for review")
            item = ReviewItem(image_path=image_path)
            self._items[item.item_id] = item
            self._flush()
            return item

    # -- leasing (one annotator per item) -----------------------------------

    def lease_next(self, duration_s: float = 300.0) -> ReviewItem | None:
        with self._lock:
            now = time.monotonic()
            for it in self._items.values():
                if it.status != "pending":
                    continue
                if self._leases.get(it.item_id, 0.0) > now:
                    continue
                self._leases[it.item_id] = now + duration_s
                return it
            return None

    def release(self, item_id: str) -> None:
        with self._lock:
            self._leases.pop(item_id, None)

    # -- persistence ---------------------------------------------------------

    def export_csv(self, path: str | os.PathLike) -> Path:
        """Write rows in the manifest CSV schema (insertion order).

        load_manifest on the result round-trips field-for-field, and a
        second export of the loaded rows is byte-identical.
        """
        with self._lock:
            return dataset.save_manifest(list(self._rows.values()), path)

    def _flush(self) -> None:
        if self._dir is None:
            return
        tmp = self._dir / ".rows.csv.tmp"
        dataset.save_manifest(list(self._rows.values()), tmp)
        tmp.replace(self._dir / "rows.csv")
        payload = [
            {
                "item_id": it.item_id,
                "image_path": it.image_path,
                "status": it.status,
                "assigned_class": it.assigned_class,
                "best_candidate": None
                if it.best_candidate is None
                else {
                    "bbox": list(it.best_candidate.bbox.as_tuple()),
                    "confidence": it.best_candidate.confidence,
                    "detector_class": it.best_candidate.detector_class,
                },
            }
            for it in self._items.values()
        ]
        tmp_json = self._dir / ".review.json.tmp"
        tmp_json.write_text(json.dumps(payload, indent=1), encoding="utf-8")
        tmp_json.replace(self._dir / "review.json")

    def _load(self) -> None:
        rows_path = self._dir / "rows.csv"
        if rows_path.is_file():
            manifest = dataset.load_manifest(rows_path)
            for rec in manifest:
                if rec.bbox is None:
                    raise ValueError(f"annotation row without bbox: {rec.image_path}")
                self._rows[rec.image_path] = AnnotationRow(rec.image_path, rec.class_id, rec.bbox, rec.source)
        review_path = self._dir / "review.json"
        if review_path.is_file():
            for entry in json.loads(review_path.read_text(encoding="utf-8")):
                cand = None
                if entry["best_candidate"] is not None:
                    c = entry["best_candidate"]
                    cand = DetectionCandidate(BoundingBox(*c["bbox"]), c["confidence"], c["detector_class"])
                item = ReviewItem(
                    image_path=entry["image_path"],
                    best_candidate=cand,
                    status=entry["status"],
                    assigned_class=entry["assigned_class"],
                    item_id=entry["item_id"],
                )
                self._items[item.item_id] = item
