"""Car-category detector adapters.

A car detector is any callable ``detector(image, path=None)`` returning
car DetectionCandidates in the image's own pixel space. Three flavors:

* SsdCarDetector wraps a single-class SsdNetwork (the pre-trained model
  path): it preprocesses, detects, and maps boxes back to source pixels.
* ManifestCarDetector replays ground-truth boxes from a manifest, with
  optional jitter; the hermetic stand-in for a pre-trained detector in
  tests and desk-scale experiments.
* SidecarCarDetector reads ``<image>.boxes.json`` files next to images.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..annotation.store import DetectionCandidate
from ..boxes import BoundingBox, clip_to_frame
from ..dataset import DatasetManifest, preprocess
from ..dataset.transforms import unpreprocess_box
from .network import SsdNetwork, detect


class SsdCarDetector:
    def __init__(self, network: SsdNetwork, conf_floor: float = 0.5, nms_iou: float = 0.45):
        if network.spec.num_classes != 1:
            raise ValueError("car detector expects a single-class (car) network")
        self.network = network
        self.conf_floor = conf_floor
        self.nms_iou = nms_iou

    def __call__(self, image: np.ndarray, path=None) -> list[DetectionCandidate]:
        h, w = image.shape[:2]
        detections = detect(self.network, preprocess(image), conf_floor=self.conf_floor, nms_iou=self.nms_iou)
        out = []
        for d in detections:
            pixel_box = unpreprocess_box(d.bbox, w, h)
            if pixel_box is not None:  # boxes entirely in the padding bands are dropped
                out.append(DetectionCandidate(pixel_box, d.prob, "car"))
        return out


class ManifestCarDetector:
    def __init__(
        self,
        manifest: DatasetManifest,
        confidence: float = 0.99,
        jitter: float = 0.0,
        seed: int = 0,
    ):
        self._boxes: dict[str, BoundingBox] = {}
        self._dims: dict[str, tuple[int, int]] = {}
        for r in manifest:
            if r.bbox is not None:
                key = str((manifest.root / r.image_path).resolve())
                self._boxes[key] = r.bbox
                self._dims[key] = (r.width, r.height)
        self.confidence = confidence
        self.jitter = jitter
        self._rng = np.random.default_rng(seed)

    def __call__(self, image: np.ndarray, path=None) -> list[DetectionCandidate]:
        if path is None:
            return []
        box = self._boxes.get(str(Path(path).resolve()))
        if box is None:
            return []
        if self.jitter > 0:
            w, h = self._dims[str(Path(path).resolve())]
            dx, dy = self.jitter * box.width, self.jitter * box.height
            shifts = self._rng.uniform(-1, 1, size=4) * np.array([dx, dy, dx, dy])
            jittered = BoundingBox(
                min(box.x_min + shifts[0], box.x_max + shifts[2] - 1.0),
                min(box.y_min + shifts[1], box.y_max + shifts[3] - 1.0),
                box.x_max + shifts[2],
                box.y_max + shifts[3],
            )
            box = clip_to_frame(jittered, w, h) or box
        return [DetectionCandidate(box, self.confidence, "car")]


class SidecarCarDetector:
    """Reads ``<image>.boxes.json``: a list of [x0, y0, x1, y1, confidence]."""

    def __call__(self, image: np.ndarray, path=None) -> list[DetectionCandidate]:
        if path is None:
            return []
        sidecar = Path(str(path) + ".boxes.json")
        if not sidecar.is_file():
            return []
        return [
            DetectionCandidate(BoundingBox(x0, y0, x1, y1), conf, "car")
            for x0, y0, x1, y1, conf in json.loads(sidecar.read_text(encoding="utf-8"))
        ]
