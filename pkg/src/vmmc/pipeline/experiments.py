"""The three experiment pipelines.

I:   preprocess + augment -> train the residual classifier, report
     train/valid/test accuracy and the test confusion matrix.
II:  detect the car, crop it (full frame as fallback), then the same
     classifier path as I.
III: fine-tune the single-shot detector on box-complete annotations with
     an 80/20 train/heldout split; report train classification accuracy,
     heldout mAP, and mean localization error.

Every run writes a reproducible directory: config.json, metrics.csv,
confusion.csv(+png) or detections.csv, checkpoint/, report.json.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Callable

import numpy as np

from ..annotation.campaign import CarDetector
from ..annotation.store import AnnotationRow, AnnotationStore
from ..boxes import iou as box_iou
from ..classifier import (
    NetworkSpec,
    TrainConfig,
    evaluate_classifier,
    file_loader,
    save_checkpoint,
    train_classifier,
)
from ..dataset import AugmentationConfig, DatasetManifest, SplitSpec, preprocess, split_dataset
from ..dataset.transforms import preprocess_box
from ..detector import (
    Detection,
    DetectorSpec,
    FineTuneConfig,
    detect,
    fine_tune,
    save_detector_checkpoint,
)
from ..detector.training import _default_loader as detector_loader
from ..evaluation import confusion_matrix, mean_average_precision
from .crops import crop_largest_car


class ExperimentError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    id: str  # "I" | "II" | "III"
    seed: int = 0
    epochs: int | None = None       # None: 100 for I/II, 30 for III
    batch_size: int = 32
    network: NetworkSpec = field(default_factory=NetworkSpec)
    detector_spec: DetectorSpec = field(default_factory=lambda: DetectorSpec(backbone="tiny"))
    augmentation: AugmentationConfig | None = field(default_factory=AugmentationConfig)
    conf_floor: float = 0.5

    def __post_init__(self):
        if self.id not in ("I", "II", "III"):
            raise ValueError(f"experiment id must be I, II, or III, got {self.id!r}")

    @property
    def fractions(self) -> tuple[float, float, float]:
        return (0.8, 0.1, 0.1) if self.id in ("I", "II") else (0.8, 0.0, 0.2)

    @property
    def default_epochs(self) -> int:
        return 30 if self.id == "III" else 100


@dataclass
class ExperimentReport:
    experiment: str
    seed: int
    scores: dict[str, float]
    class_counts: dict[int, int]
    run_dir: str
    fallback_full_frame: int = 0

    def to_json(self) -> dict:
        return asdict(self)


def _run_dir(out_root: Path, spec: ExperimentSpec) -> Path:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    path = out_root / f"{stamp}-exp{spec.id}-seed{spec.seed}"
    suffix = 0
    while path.exists():
        suffix += 1
        path = out_root / f"{stamp}-exp{spec.id}-seed{spec.seed}.{suffix}"
    path.mkdir(parents=True)
    return path


def _crop_loader(detector: CarDetector, fallback_counter: list[int]):
    def loader(manifest: DatasetManifest, record) -> np.ndarray:
        image = file_loader(manifest, record)
        crop = crop_largest_car(image, detector, path=manifest.resolve(record))
        if crop is None:
            fallback_counter[0] += 1  # keep the image; splits stay size-stable
            return image
        return crop

    return loader


def _classifier_experiment(
    spec: ExperimentSpec,
    manifest: DatasetManifest,
    run_dir: Path,
    detector: CarDetector | None,
    log: Callable[[str], None] | None,
) -> ExperimentReport:
    train, val, test = split_dataset(manifest, SplitSpec(spec.seed, spec.fractions))
    fallback = [0]
    loader = file_loader if detector is None else _crop_loader(detector, fallback)
    cfg = TrainConfig(
        batch_size=spec.batch_size,
        epochs=spec.epochs or spec.default_epochs,
        seed=spec.seed,
        augmentation=spec.augmentation,
    )
    net, history = train_classifier(train, val, cfg, spec=spec.network, loader=loader, log=log)
    save_checkpoint(run_dir / "checkpoint", net, cfg, history)

    train_acc, _, _ = evaluate_classifier(net, train, spec.batch_size, loader)
    val_acc, _, _ = evaluate_classifier(net, val, spec.batch_size, loader)
    test_acc, preds, truths = evaluate_classifier(net, test, spec.batch_size, loader)
    matrix = confusion_matrix(truths, preds)
    (run_dir / "confusion.csv").write_text(matrix.to_csv(), encoding="utf-8")
    matrix.save_png(run_dir / "confusion.png")

    if detector is not None:
        _export_detections_csv(manifest, detector, run_dir / "detections.csv")

    return ExperimentReport(
        experiment=spec.id,
        seed=spec.seed,
        scores={"train": train_acc, "valid": val_acc, "test": test_acc},
        class_counts=manifest.class_counts,
        run_dir=str(run_dir),
        fallback_full_frame=fallback[0],
    )


def _export_detections_csv(manifest: DatasetManifest, detector: CarDetector, path: Path) -> None:
    """The detect-crop stage's coordinates in annotation-CSV form; these
    rows are exactly what the fine-tuning experiment consumes as ground
    truth."""
    store = AnnotationStore()
    for record in manifest:
        image = file_loader(manifest, record)
        candidates = detector(image, path=manifest.resolve(record))
        if not candidates:
            continue
        best = max(candidates, key=lambda c: c.bbox.area)
        h, w = image.shape[:2]
        store.add_auto_row(
            AnnotationRow(record.image_path, record.class_id, best.bbox.clip(0, 0, w, h), source="auto")
        )
    store.export_csv(path)


def _detection_scores(network, manifest: DatasetManifest, conf_floor: float):
    """(classification accuracy of the top detection, mAP, mean localization
    error) over a box-complete manifest."""
    detections: list[tuple[str, Detection]] = []
    ground_truths: dict[str, list] = {}
    top_correct = 0
    iou_sum, iou_n = 0.0, 0
    for record in manifest:
        image = detector_loader(manifest, record)
        gt_box = preprocess_box(record.bbox, record.width, record.height)
        ground_truths[record.image_path] = [(gt_box, record.class_id)]
        dets = detect(network, preprocess(image), conf_floor=0.0, pre_nms_floor=0.05)
        for d in dets:
            detections.append((record.image_path, d))
        if dets:
            top = max(dets, key=lambda d: d.prob)
            if top.prob >= conf_floor and top.class_id == record.class_id:
                top_correct += 1
            iou_sum += box_iou(top.bbox, gt_box)
            iou_n += 1
    result = mean_average_precision(detections, ground_truths, iou_threshold=0.5)
    cls_acc = top_correct / max(len(manifest), 1)
    loc_err = 1.0 - (iou_sum / iou_n) if iou_n else 1.0
    return cls_acc, result, loc_err


def _detector_experiment(
    spec: ExperimentSpec,
    manifest: DatasetManifest,
    run_dir: Path,
    log: Callable[[str], None] | None,
) -> ExperimentReport:
    missing = [r.image_path for r in manifest if r.bbox is None]
    if missing:
        raise ExperimentError(f"{len(missing)} records lack ground-truth boxes (e.g. {missing[0]})")
    train, _, heldout = split_dataset(manifest, SplitSpec(spec.seed, spec.fractions))
    cfg = FineTuneConfig(epochs=spec.epochs or spec.default_epochs, batch_size=spec.batch_size, seed=spec.seed)
    network, history = fine_tune(None, train, cfg, spec=spec.detector_spec, log=log)
    save_detector_checkpoint(run_dir / "checkpoint", network, history)

    train_cls, train_map, _ = _detection_scores(network, train, spec.conf_floor)
    heldout_cls, heldout_map, heldout_loc = _detection_scores(network, heldout, spec.conf_floor)
    scores = {
        "train": train_cls,
        "train_map": train_map.mean,
        # Table-style single held-out figure; valid and test are not split
        "heldout": heldout_cls,
        "heldout_map": heldout_map.mean,
        "heldout_localization_error": heldout_loc,
        "final_loss": history[-1]["loss"],
    }
    return ExperimentReport(
        experiment=spec.id,
        seed=spec.seed,
        scores=scores,
        class_counts=manifest.class_counts,
        run_dir=str(run_dir),
    )


def run_experiment(
    spec: ExperimentSpec,
    manifest: DatasetManifest,
    out_root: str | Path = "runs",
    detector: CarDetector | None = None,
    log: Callable[[str], None] | None = None,
) -> ExperimentReport:
    """Run one experiment end to end and write its run directory."""
    out_root = Path(out_root)
    run_dir = _run_dir(out_root, spec)
    (run_dir / "config.json").write_text(
        json.dumps(
            {
                "experiment": spec.id,
                "seed": spec.seed,
                "epochs": spec.epochs or spec.default_epochs,
                "batch_size": spec.batch_size,
                "fractions": spec.fractions,
                "network": json.loads(spec.network.to_json()),
                "detector": json.loads(spec.detector_spec.to_json()),
                "augmentation": None if spec.augmentation is None else asdict(spec.augmentation),
            },
            indent=1,
        ),
        encoding="utf-8",
    )
    if spec.id == "I":
        report = _classifier_experiment(spec, manifest, run_dir, None, log)
    elif spec.id == "II":
        if detector is None:
            raise ExperimentError("experiment II needs a car detector (checkpoint or instance)")
        report = _classifier_experiment(spec, manifest, run_dir, detector, log)
    else:
        report = _detector_experiment(spec, manifest, run_dir, log)
    (run_dir / "report.json").write_text(json.dumps(report.to_json(), indent=1), encoding="utf-8")
    return report
