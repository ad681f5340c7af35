"""vmmc command line: dataset tooling, annotation campaigns, training,
detection, evaluation, and the fraud-watch service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np
from PIL import Image

from . import dataset as ds
from .annotation import AnnotationConfig, AnnotationStore, create_review_app, run_campaign
from .boxes import BoundingBox
from .classifier import TrainConfig, load_checkpoint, predict, train_classifier
from .detector import (
    DetectorSpec,
    FineTuneConfig,
    SidecarCarDetector,
    SsdCarDetector,
    detect,
    fine_tune,
    load_detector_checkpoint,
)
from .evaluation import accuracy, confusion_matrix, mean_average_precision
from .detector.nms import Detection
from .fraudwatch import AuditLog, Registry, create_fraudwatch_app
from .pipeline import ExperimentSpec, run_experiment
from .synthetic import generate_corpus


@click.group()
def main():
    """Vehicle make-model classification toolkit."""


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--classes", "classes_json", type=click.Path(exists=True), default=None,
              help="JSON mapping subdirectory name -> class id")
def ingest(directory, out_path, classes_json):
    """Scan an image tree into a manifest CSV."""
    class_dirs = json.loads(Path(classes_json).read_text()) if classes_json else None
    manifest = ds.ingest_directory(directory, class_dirs)
    ds.save_manifest(manifest, out_path)
    click.echo(f"wrote {len(manifest)} records to {out_path}")


@main.command()
@click.argument("manifest_path", type=click.Path(exists=True))
@click.option("--seed", default=0, type=int)
@click.option("--fractions", default="0.8,0.1,0.1", show_default=True)
@click.option("--out-dir", type=click.Path(), default=None, help="defaults next to the manifest")
def split(manifest_path, seed, fractions, out_dir):
    """Stratified train/val/test split of a manifest."""
    fracs = tuple(float(f) for f in fractions.split(","))
    if len(fracs) != 3:
        raise click.BadParameter("fractions must be three comma-separated numbers")
    manifest = ds.load_manifest(manifest_path)
    parts = ds.split_dataset(manifest, ds.SplitSpec(seed, fracs))
    out_dir = Path(out_dir) if out_dir else Path(manifest_path).parent
    for name, part in zip(("train", "val", "test"), parts):
        ds.save_manifest(part, out_dir / f"{name}.csv")
        click.echo(f"{name}: {len(part)} records -> {out_dir / (name + '.csv')}")


@main.command()
@click.argument("root_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--classes", "classes_json", required=True, type=click.Path(exists=True),
              help='JSON list of class folder names (ids follow order) or {"folder": id} map')
@click.option("--certain-size", default=0.1, show_default=True, type=float)
@click.option("--conf-threshold", default=0.5, show_default=True, type=float)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--det-ckpt", type=click.Path(exists=True), default=None,
              help="car-detector checkpoint; without it, sidecar .boxes.json stubs drive detection")
@click.option("--store-dir", type=click.Path(), default=None, help="persist the campaign for resuming")
def annotate(root_dir, classes_json, certain_size, conf_threshold, out_path, det_ckpt, store_dir):
    """Semi-automatic annotation campaign over class folders."""
    root = Path(root_dir)
    raw = json.loads(Path(classes_json).read_text())
    if isinstance(raw, dict):
        classes = [(root / folder, int(cid)) for folder, cid in raw.items()]
    else:
        classes = [root / folder for folder in raw]
    detector = SsdCarDetector(load_detector_checkpoint(det_ckpt)) if det_ckpt else SidecarCarDetector()
    cfg = AnnotationConfig(certain_size=certain_size, detector_confidence_threshold=conf_threshold)
    store = AnnotationStore(store_dir) if store_dir else None
    store = run_campaign(classes, detector, cfg, store=store, root=root)
    store.export_csv(out_path)
    stats = store.stats()
    click.echo(f"auto rows: {stats['auto_rows']}, queued for review: {stats['pending']} -> {out_path}")


@main.command()
@click.option("--experiment", type=click.Choice(["1", "3"]), required=True)
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--epochs", type=int, default=None, help="default: 100 for exp 1, 30 for exp 3")
@click.option("--batch", default=32, show_default=True, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--val-fraction", default=0.1, show_default=True, type=float)
@click.option("--backbone", default="vgg16", show_default=True, type=click.Choice(["vgg16", "tiny"]))
@click.option("--out", "out_dir", required=True, type=click.Path())
def train(experiment, manifest_path, epochs, batch, seed, val_fraction, backbone, out_dir):
    """Train the classifier (exp 1) or fine-tune the detector (exp 3)."""
    manifest = ds.load_manifest(manifest_path)
    if experiment == "1":
        train_part, val_part, _ = ds.split_dataset(
            manifest, ds.SplitSpec(seed, (1.0 - 2 * val_fraction, val_fraction, val_fraction))
        )
        cfg = TrainConfig(batch_size=batch, epochs=epochs or 100, seed=seed)
        _, history = train_classifier(train_part, val_part, cfg, out_dir=out_dir, log=click.echo)
        best = max(h.val_acc for h in history)
        click.echo(f"best val accuracy {best:.4f}; checkpoint in {out_dir}")
    else:
        cfg = FineTuneConfig(epochs=epochs or 30, batch_size=batch, seed=seed)
        _, history = fine_tune(
            None, manifest, cfg, spec=DetectorSpec(backbone=backbone), out_dir=out_dir, log=click.echo
        )
        click.echo(f"final loss {history[-1]['loss']:.4f}; checkpoint in {out_dir}")


@main.command(name="predict")
@click.option("--ckpt", "ckpt_dir", required=True, type=click.Path(exists=True))
@click.option("--image", "image_path", required=True, type=click.Path(exists=True))
def predict_cmd(ckpt_dir, image_path):
    """Classify one image; prints [{"class": k, "prob": p}, ...]."""
    net = load_checkpoint(ckpt_dir)
    with Image.open(image_path) as im:
        arr = np.asarray(im.convert("RGB"))
    scores = predict(net, ds.preprocess(arr))
    click.echo(json.dumps(scores.as_json()))


@main.command(name="detect")
@click.option("--ckpt", "ckpt_dir", required=True, type=click.Path(exists=True))
@click.option("--image", "image_path", required=True, type=click.Path(exists=True))
@click.option("--conf", default=0.5, show_default=True, type=float)
def detect_cmd(ckpt_dir, image_path, conf):
    """Detect vehicles; one JSON line per detection (normalized boxes)."""
    network = load_detector_checkpoint(ckpt_dir)
    with Image.open(image_path) as im:
        arr = np.asarray(im.convert("RGB"))
    for det in detect(network, ds.preprocess(arr), conf_floor=conf):
        click.echo(json.dumps(det.as_json()))


@main.command()
@click.option("--experiment", type=click.Choice(["1", "2", "3"]), required=True)
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, type=int)
@click.option("--epochs", type=int, default=None)
@click.option("--batch", default=32, show_default=True, type=int)
@click.option("--det-ckpt", type=click.Path(exists=True), default=None, help="car detector for experiment 2")
@click.option("--backbone", default="tiny", show_default=True, type=click.Choice(["vgg16", "tiny"]))
@click.option("--out", "out_root", default="runs", show_default=True, type=click.Path())
def run(experiment, manifest_path, seed, epochs, batch, det_ckpt, backbone, out_root):
    """Run one of the three experiment pipelines end to end."""
    manifest = ds.load_manifest(manifest_path)
    spec = ExperimentSpec(
        id={"1": "I", "2": "II", "3": "III"}[experiment],
        seed=seed,
        epochs=epochs,
        batch_size=batch,
        detector_spec=DetectorSpec(backbone=backbone),
    )
    detector = None
    if experiment == "2":
        if det_ckpt is None:
            raise click.UsageError("experiment 2 needs --det-ckpt")
        detector = SsdCarDetector(load_detector_checkpoint(det_ckpt))
    report = run_experiment(spec, manifest, out_root=out_root, detector=detector, log=click.echo)
    click.echo(json.dumps(report.to_json(), indent=1))


@main.command(name="eval")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True),
              help='JSONL: {"image_path", "pred"} for accuracy/confusion; '
                   '{"image_path", "prob", "class", "bbox": [pixels]} for map')
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True))
@click.option("--metric", type=click.Choice(["accuracy", "confusion", "map"]), required=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
def eval_cmd(pred_path, truth_path, metric, out_dir):
    """Score a predictions file against a truth manifest."""
    manifest = ds.load_manifest(truth_path)
    rows = [json.loads(line) for line in Path(pred_path).read_text().splitlines() if line.strip()]
    out_dir = Path(out_dir) if out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    if metric in ("accuracy", "confusion"):
        truth_by_path = {r.image_path: r.class_id for r in manifest}
        pairs = [(truth_by_path[row["image_path"]], int(row["pred"])) for row in rows]
        matrix = confusion_matrix([t for t, _ in pairs], [p for _, p in pairs])
        if metric == "accuracy":
            click.echo(f"accuracy: {accuracy(matrix):.4f}")
        else:
            click.echo(matrix.to_csv(), nl=False)
        if out_dir:
            (out_dir / "confusion.csv").write_text(matrix.to_csv(), encoding="utf-8")
            matrix.save_png(out_dir / "confusion.png")
    else:
        ground_truths = {
            r.image_path: [(r.bbox, r.class_id)] for r in manifest if r.bbox is not None
        }
        detections = [
            (row["image_path"], Detection(float(row["prob"]), int(row["class"]), BoundingBox(*row["bbox"])))
            for row in rows
        ]
        result = mean_average_precision(detections, ground_truths)
        payload = {"mAP": result.mean, "per_class": {str(k): v for k, v in result.per_class.items()}}
        click.echo(json.dumps(payload, indent=1))
        if out_dir:
            (out_dir / "map.json").write_text(json.dumps(payload, indent=1), encoding="utf-8")


@main.command()
@click.option("--registry", "registry_path", required=True, type=click.Path())
@click.option("--ckpt", "ckpt_dir", type=click.Path(exists=True), default=None)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--audit-log", type=click.Path(), default=None)
@click.option("--confidence-floor", default=0.8, show_default=True, type=float)
def serve_fraud(registry_path, ckpt_dir, port, audit_log, confidence_floor):
    """Serve the fraud-watch HTTP API."""
    import uvicorn

    registry = Registry(registry_path)
    classifier = load_checkpoint(ckpt_dir) if ckpt_dir else None
    log = AuditLog(audit_log) if audit_log else None
    app = create_fraudwatch_app(registry, classifier, log, confidence_floor)
    uvicorn.run(app, host="0.0.0.0", port=port)


@main.command()
@click.option("--store-dir", required=True, type=click.Path())
@click.option("--images", "image_root", type=click.Path(exists=True), default=None)
@click.option("--port", default=8001, show_default=True, type=int)
def serve_review(store_dir, image_root, port):
    """Serve the annotation review HTTP API."""
    import uvicorn

    app = create_review_app(AnnotationStore(store_dir), image_root)
    uvicorn.run(app, host="0.0.0.0", port=port)


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--per-class", default=100, show_default=True, type=int)
@click.option("--seed", default=0, type=int)
def synth(out_dir, per_class, seed):
    """Generate the synthetic desk-scale corpus."""
    manifest_path = generate_corpus(out_dir, per_class=per_class, seed=seed)
    click.echo(f"wrote {manifest_path}")


if __name__ == "__main__":
    sys.exit(main())
