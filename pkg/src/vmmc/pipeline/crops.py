"""Crop logic shared by the detect-then-classify pipeline and annotation."""

from __future__ import annotations

import numpy as np

from ..annotation.campaign import CarDetector
from ..boxes import clip_to_frame


def crop_largest_car(image: np.ndarray, detector: CarDetector, path=None) -> np.ndarray | None:
    """Crop of the largest-area detected car, or None when the detector
    reports nothing above its own confidence floor."""
    candidates = detector(image, path=path)
    if not candidates:
        return None
    best = max(candidates, key=lambda c: c.bbox.area)
    h, w = image.shape[:2]
    box = clip_to_frame(best.bbox, w, h)
    if box is None:
        return None
    x0, y0 = int(np.floor(box.x_min)), int(np.floor(box.y_min))
    x1, y1 = int(np.ceil(box.x_max)), int(np.ceil(box.y_max))
    if x1 <= x0 or y1 <= y0:
        return None
    return image[y0:y1, x0:x1]
