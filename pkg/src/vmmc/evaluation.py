"""Evaluation: accuracy, confusion matrices, mean average precision, and
detector throughput.

mAP follows the all-points convention: detections ranked by confidence,
a detection is a true positive when it overlaps a same-class, same-image,
not-yet-matched ground truth at IoU >= threshold, and AP is the area under
the monotone (interpolated) precision envelope. Classes with no ground
truth have undefined AP and are excluded from the mean.
"""

from __future__ import annotations

import os
import platform
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .boxes import BoundingBox, iou
from .detector.nms import Detection
from .labels import NUM_CLASSES


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray = field(repr=False)  # (C, C): rows true, cols predicted

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise EvaluationError(f"confusion matrix must be square, got {c.shape}")
        if (c < 0).any():
            raise EvaluationError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self) -> str:
        header = "true\\pred," + ",".join(str(i) for i in range(self.counts.shape[1]))
        lines = [header]
        for t in range(self.counts.shape[0]):
            lines.append(f"{t}," + ",".join(str(int(v)) for v in self.counts[t]))
        return "\n".join(lines) + "\n"

    def save_png(self, path) -> None:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 5))
        im = ax.imshow(self.counts, cmap="Blues")
        ax.set_xlabel("predicted")
        ax.set_ylabel("true")
        for t in range(self.counts.shape[0]):
            for p in range(self.counts.shape[1]):
                ax.text(p, t, int(self.counts[t, p]), ha="center", va="center", fontsize=8)
        fig.colorbar(im)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)


def confusion_matrix(truths: Sequence[int], predictions: Sequence[int], num_classes: int = NUM_CLASSES) -> ConfusionMatrix:
    truths = np.asarray(truths, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if truths.shape != predictions.shape:
        raise EvaluationError("truths and predictions must have equal length")
    if truths.size and (truths.min() < 0 or truths.max() >= num_classes
                        or predictions.min() < 0 or predictions.max() >= num_classes):
        raise EvaluationError(f"labels must lie in 0..{num_classes - 1}")
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (truths, predictions), 1)
    return ConfusionMatrix(counts)


def accuracy(matrix: ConfusionMatrix) -> float:
    if matrix.total == 0:
        raise EvaluationError("empty confusion matrix")
    return float(np.trace(matrix.counts) / matrix.total)


@dataclass(frozen=True)
class PrecisionRecallCurve:
    class_id: int
    points: tuple[tuple[float, float], ...]  # (recall, precision), recall non-decreasing


@dataclass(frozen=True)
class MapResult:
    per_class: dict[int, float | None]
    mean: float
    curves: dict[int, PrecisionRecallCurve]


def _average_precision(recalls: np.ndarray, precisions: np.ndarray) -> float:
    """Area under the monotone precision envelope (all-points interpolation)."""
    r = np.concatenate(([0.0], recalls, [recalls[-1] if recalls.size else 0.0]))
    p = np.concatenate(([0.0], precisions, [0.0]))
    for i in range(p.size - 2, -1, -1):
        p[i] = max(p[i], p[i + 1])
    steps = np.where(r[1:] != r[:-1])[0]
    return float(np.sum((r[steps + 1] - r[steps]) * p[steps + 1]))


def mean_average_precision(
    detections: Iterable[tuple[object, Detection]],
    ground_truths: dict[object, list[tuple[BoundingBox, int]]],
    iou_threshold: float = 0.5,
) -> MapResult:
    """Per-class AP and their unweighted mean.

    ``detections`` yields (image_id, Detection); ``ground_truths`` maps
    image_id to its (box, class_id) list. Each ground truth can satisfy at
    most one detection.
    """
    detections = list(detections)
    class_ids = sorted({c for gts in ground_truths.values() for _, c in gts}
                       | {d.class_id for _, d in detections})
    gt_count = {c: 0 for c in class_ids}
    matched: dict[object, list[bool]] = {}
    for img, gts in ground_truths.items():
        matched[img] = [False] * len(gts)
        for _, c in gts:
            gt_count[c] += 1

    per_class: dict[int, float | None] = {}
    curves: dict[int, PrecisionRecallCurve] = {}
    for c in class_ids:
        if gt_count[c] == 0:
            per_class[c] = None  # AP undefined without ground truth
            continue
        dets = [(img, d) for img, d in detections if d.class_id == c]
        dets.sort(key=lambda t: -t[1].prob)
        tp = np.zeros(len(dets))
        fp = np.zeros(len(dets))
        for i, (img, d) in enumerate(dets):
            gts = ground_truths.get(img, [])
            best_iou, best_j = 0.0, -1
            for j, (gt_box, gt_class) in enumerate(gts):
                if gt_class != c or matched[img][j]:
                    continue
                overlap = iou(d.bbox, gt_box)
                if overlap > best_iou:
                    best_iou, best_j = overlap, j
            if best_j >= 0 and best_iou >= iou_threshold:
                matched[img][best_j] = True
                tp[i] = 1
            else:
                fp[i] = 1
        cum_tp = np.cumsum(tp)
        cum_fp = np.cumsum(fp)
        recalls = cum_tp / gt_count[c]
        precisions = cum_tp / np.maximum(cum_tp + cum_fp, 1e-12)
        per_class[c] = _average_precision(recalls, precisions) if len(dets) else 0.0
        curves[c] = PrecisionRecallCurve(c, tuple(zip(recalls.tolist(), precisions.tolist())))

    defined = [v for v in per_class.values() if v is not None]
    mean = float(np.mean(defined)) if defined else 0.0
    return MapResult(per_class, mean, curves)


def hardware_description() -> str:
    cpu = platform.processor() or platform.machine()
    return f"{platform.system()} {platform.release()}, {cpu}, {os.cpu_count()} logical cpus"


@dataclass(frozen=True)
class FpsReport:
    fps: float
    frames_measured: int
    elapsed_s: float
    warmup_frames: int
    hardware: str


def fps_benchmark(
    detector: Callable[[np.ndarray], object],
    frames: Iterable[np.ndarray],
    duration_s: float | None = None,
    warmup: int = 5,
) -> FpsReport:
    """Wall-clock detector throughput over a frame stream.

    The first ``warmup`` frames run outside the timed window. With
    ``duration_s`` set, measurement stops once that much timed wall clock
    has elapsed; otherwise the stream is drained.
    """
    it: Iterator[np.ndarray] = iter(frames)
    measured = 0
    consumed_any = False
    start = None
    for i, frame in enumerate(it):
        consumed_any = True
        if i == warmup:
            start = time.perf_counter()
        detector(frame)
        if i >= warmup:
            measured += 1
            if duration_s is not None and time.perf_counter() - start >= duration_s:
                break
    if not consumed_any:
        raise EvaluationError("empty frame stream")
    if measured == 0 or start is None:
        raise EvaluationError("stream shorter than the warmup window")
    elapsed = time.perf_counter() - start
    return FpsReport(measured / elapsed, measured, elapsed, warmup, hardware_description())
