"""Semi-automatic annotation: detector proposes, humans settle the rest.

For each image the car detector's largest-area candidate is taken. If it
covers at least ``certain_size`` of the image, the image is auto-annotated
with the campaign's current class id; otherwise it lands in the review
queue. Running the campaign once per class folder, advancing the class id
each time, yields the consolidated annotation CSV.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from PIL import Image

from ..boxes import clip_to_frame
from ..labels import is_valid_class_id
from .store import AnnotationRow, AnnotationStore, DetectionCandidate, ReviewItem

# A car detector maps an HxWx3 uint8 image to car-category candidates.
# The image path rides along as context so fixture detectors can key on it;
# real detectors ignore it.
CarDetector = Callable[..., "list[DetectionCandidate]"]

IMAGE_EXTS = {".jpg", ".jpeg", ".png", ".bmp"}


class DetectorError(RuntimeError):
    """Detector failed mid-campaign; partial results were flushed."""

    def __init__(self, message: str, rows, queue):
        super().__init__(message)
        self.rows = rows
        self.queue = queue


@dataclass(frozen=True)
class AnnotationConfig:
    certain_size: float = 0.10  # car area as a fraction of image area
    detector_confidence_threshold: float = 0.5
    class_id: int = 0

    def __post_init__(self):
        if not 0.0 < self.certain_size <= 1.0:
            raise ValueError("certain_size must be in (0, 1]")
        if not 0.0 <= self.detector_confidence_threshold <= 1.0:
            raise ValueError("detector_confidence_threshold must be in [0, 1]")
        if not is_valid_class_id(self.class_id):
            raise ValueError(f"unknown class_id {self.class_id}")


def _read_image(path: Path) -> np.ndarray | None:
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("RGB"))
    except OSError:
        return None


def auto_annotate(
    images: Sequence[str | os.PathLike],
    detector: CarDetector,
    cfg: AnnotationConfig,
    store: AnnotationStore | None = None,
    root: Path | None = None,
) -> tuple[list[AnnotationRow], list[ReviewItem]]:
    """Partition images into auto rows and review items.

    Every image produces exactly one of the two. An unreadable image
    becomes a review item with no candidate; a detector exception aborts
    with the partial results flushed to the store and attached to the
    raised DetectorError.
    """
    if store is None:
        store = AnnotationStore()
    rows: list[AnnotationRow] = []
    queue: list[ReviewItem] = []
    for path in images:
        path = Path(path)
        key = str(path.relative_to(root)) if root is not None else str(path)
        image = _read_image(path)
        if image is None:
            item = store.enqueue(ReviewItem(image_path=key))
            queue.append(item)
            continue
        try:
            candidates = detector(image, path=path)
        except Exception as exc:
            raise DetectorError(f"detector failed on {path}: {exc}", rows, queue) from exc
        h, w = image.shape[:2]
        usable = [
            c for c in candidates
            if c.confidence >= cfg.detector_confidence_threshold
        ]
        best = max(usable, key=lambda c: c.bbox.area, default=None)
        bbox = clip_to_frame(best.bbox, w, h) if best is not None else None
        if best is not None and bbox is not None and best.bbox.area >= cfg.certain_size * (w * h):
            row = AnnotationRow(key, cfg.class_id, bbox, source="auto")
            store.add_auto_row(row)
            rows.append(row)
        else:
            item = store.enqueue(ReviewItem(image_path=key, best_candidate=best))
            queue.append(item)
    return rows, queue


def _list_images(folder: Path) -> list[Path]:
    return sorted(p for p in folder.rglob("*") if p.is_file() and p.suffix.lower() in IMAGE_EXTS)


def run_campaign(
    classes: Iterable[str | os.PathLike | tuple[str | os.PathLike, int]],
    detector: CarDetector,
    cfg: AnnotationConfig,
    store: AnnotationStore | None = None,
    root: Path | None = None,
) -> AnnotationStore:
    """Annotate one class folder after another, advancing the class id.

    ``classes`` is a sequence of folders (ids assigned 0, 1, ... in order)
    or explicit (folder, class_id) pairs. Folders must be disjoint and
    must not share image paths.
    """
    pairs: list[tuple[Path, int]] = []
    for i, entry in enumerate(classes):
        if isinstance(entry, tuple):
            folder, class_id = entry
        else:
            folder, class_id = entry, i
        pairs.append((Path(folder), int(class_id)))

    all_paths: dict[str, Path] = {}
    per_class: list[tuple[list[Path], int]] = []
    for folder, class_id in pairs:
        imgs = _list_images(folder)
        for p in imgs:
            key = str(p.relative_to(root)) if root is not None else str(p)
            if key in all_paths:
                raise ValueError(f"image path {key!r} appears in more than one class folder")
            all_paths[key] = p
        per_class.append((imgs, class_id))

    if store is None:
        store = AnnotationStore()
    for imgs, class_id in per_class:
        auto_annotate(imgs, detector, replace(cfg, class_id=class_id), store=store, root=root)
    return store
