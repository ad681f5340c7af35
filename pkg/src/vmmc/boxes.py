"""Axis-aligned bounding boxes and overlap geometry.

Boxes are corner-coded (x_min, y_min, x_max, y_max) with a flag saying
whether coordinates are pixels or normalized to [0, 1]. Mixing the two
conventions in a binary operation is an error, not a silent unit bug.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class BoundingBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float
    normalized: bool = False

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(
                f"degenerate box: ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    def clip(self, x_lo: float, y_lo: float, x_hi: float, y_hi: float) -> "BoundingBox":
        return replace(
            self,
            x_min=min(max(self.x_min, x_lo), x_hi),
            y_min=min(max(self.y_min, y_lo), y_hi),
            x_max=max(min(self.x_max, x_hi), x_lo),
            y_max=max(min(self.y_max, y_hi), y_lo),
        )

    def to_pixels(self, width: int, height: int) -> "BoundingBox":
        if not self.normalized:
            return self
        return BoundingBox(
            self.x_min * width, self.y_min * height,
            self.x_max * width, self.y_max * height,
            normalized=False,
        )

    def to_normalized(self, width: int, height: int) -> "BoundingBox":
        if self.normalized:
            return self
        return BoundingBox(
            self.x_min / width, self.y_min / height,
            self.x_max / width, self.y_max / height,
            normalized=True,
        )


def clip_to_frame(box: BoundingBox, width: float, height: float) -> BoundingBox | None:
    """Box intersected with [0, width] x [0, height]; None when nothing
    of it lies inside the frame."""
    x0, y0 = max(box.x_min, 0.0), max(box.y_min, 0.0)
    x1, y1 = min(box.x_max, float(width)), min(box.y_max, float(height))
    if x1 <= x0 or y1 <= y0:
        return None
    return BoundingBox(x0, y0, x1, y1, normalized=box.normalized)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes in the same coordinate convention."""
    if a.normalized != b.normalized:
        raise ValueError("cannot compute IoU across pixel and normalized boxes")
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0.0 or iy <= 0.0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise IoU between two corner-coded box arrays, shapes (N,4) and (M,4)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[0]))
    ix = np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0])
    iy = np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1])
    inter = np.clip(ix, 0.0, None) * np.clip(iy, 0.0, None)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    out = np.zeros_like(inter)
    np.divide(inter, union, out=out, where=union > 0)
    return out
