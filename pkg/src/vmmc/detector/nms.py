"""Greedy non-maximum suppression.

Repeatedly keep the highest-probability detection and drop every other
detection of the same class overlapping it with IoU strictly above the
threshold. Ties in probability resolve to the earlier (lower-index)
detection, which makes the operation deterministic and testable against a
brute-force reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..boxes import BoundingBox


@dataclass(frozen=True)
class Detection:
    prob: float
    class_id: int
    bbox: BoundingBox

    def __post_init__(self):
        if not 0.0 <= self.prob <= 1.0:
            raise ValueError(f"prob must be in [0, 1], got {self.prob}")

    def as_row(self) -> tuple[float, int, float, float, float, float]:
        return (self.prob, self.class_id, *self.bbox.as_tuple())

    def as_json(self) -> dict:
        return {"prob": self.prob, "class": self.class_id, "bbox": list(self.bbox.as_tuple())}


def nms_indices(
    boxes: np.ndarray, probs: np.ndarray, classes: np.ndarray | None, iou_threshold: float
) -> list[int]:
    """Indices kept by greedy NMS over corner boxes, highest prob first.

    With ``classes`` given, suppression only applies within a class.
    Returned indices are ordered by descending probability (ties by
    original index).
    """
    boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    probs = np.asarray(probs, dtype=np.float64)
    n = boxes.shape[0]
    if n == 0:
        return []
    if classes is None:
        classes = np.zeros(n, dtype=np.int64)
    order = np.argsort(-probs, kind="stable")
    areas = (boxes[:, 2] - boxes[:, 0]) * (boxes[:, 3] - boxes[:, 1])
    keep: list[int] = []
    alive = np.ones(n, dtype=bool)
    for idx in order:
        if not alive[idx]:
            continue
        keep.append(int(idx))
        same = alive & (classes == classes[idx])
        same[idx] = False
        if not same.any():
            alive[idx] = False
            continue
        rest = np.where(same)[0]
        ix = np.minimum(boxes[rest, 2], boxes[idx, 2]) - np.maximum(boxes[rest, 0], boxes[idx, 0])
        iy = np.minimum(boxes[rest, 3], boxes[idx, 3]) - np.maximum(boxes[rest, 1], boxes[idx, 1])
        inter = np.clip(ix, 0, None) * np.clip(iy, 0, None)
        union = areas[rest] + areas[idx] - inter
        overlap = np.where(union > 0, inter / union, 0.0)
        alive[rest[overlap > iou_threshold]] = False
        alive[idx] = False
    return keep


def nms(detections: list[Detection], iou_threshold: float = 0.45, per_class: bool = True) -> list[Detection]:
    """Suppress overlapping detections; result sorted by descending prob."""
    if not detections:
        return []
    boxes = np.array([d.bbox.as_tuple() for d in detections])
    probs = np.array([d.prob for d in detections])
    classes = np.array([d.class_id for d in detections]) if per_class else None
    keep = nms_indices(boxes, probs, classes, iou_threshold)
    return [detections[i] for i in keep]
