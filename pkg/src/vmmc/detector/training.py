"""Detector fine-tuning on an annotated manifest.

Every train record must carry a ground-truth box (the annotation module
produces them). Targets are precomputed once per image: anchors matched
to the (preprocess-geometry-corrected) normalized box, offsets encoded,
labels shifted so background is class 0.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import torch
from PIL import Image

from ..dataset import DatasetManifest, preprocess
from ..dataset.transforms import preprocess_box
from .losses import DetectorLossConfig, ssd_loss
from .matching import encode_boxes, match_anchors
from .network import DetectorSpec, SsdNetwork, build_detector


@dataclass(frozen=True)
class FineTuneConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0
    loss: DetectorLossConfig = DetectorLossConfig()
    freeze_backbone: bool = False

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")


def _default_loader(manifest: DatasetManifest, record) -> np.ndarray:
    with Image.open(manifest.resolve(record)) as im:
        return np.asarray(im.convert("RGB"))


class _DetectionDataset:
    def __init__(self, manifest: DatasetManifest, anchors, iou_threshold: float, loader):
        images, offsets, labels = [], [], []
        for r in manifest:
            if r.bbox is None:
                raise ValueError(f"record without ground-truth bbox: {r.image_path}")
            images.append(preprocess(loader(manifest, r)).astype(np.float16))
            gt = preprocess_box(r.bbox, r.width, r.height)
            gt_arr = np.array([gt.as_tuple()])
            assignment = match_anchors(anchors, gt_arr, iou_threshold)
            target_off = np.zeros((len(anchors), 4), dtype=np.float32)
            pos = assignment.positive_mask
            target_off[pos] = encode_boxes(anchors.centers[pos], gt_arr[assignment.gt_index[pos]])
            target_lab = np.zeros(len(anchors), dtype=np.int64)
            target_lab[pos] = r.class_id + 1  # head class 0 is background
            offsets.append(target_off)
            labels.append(target_lab)
        self.images = np.stack(images)
        self.offsets = np.stack(offsets)
        self.labels = np.stack(labels)

    def __len__(self):
        return len(self.images)


def fine_tune(
    network: SsdNetwork | None,
    train: DatasetManifest,
    cfg: FineTuneConfig = FineTuneConfig(),
    spec: DetectorSpec | None = None,
    out_dir: str | Path | None = None,
    loader: Callable = _default_loader,
    log: Callable[[str], None] | None = None,
) -> tuple[SsdNetwork, list[dict]]:
    """Train (or continue training) a detector; returns it plus per-epoch
    loss history. Pass ``network=None`` to build one from ``spec``."""
    if len(train) == 0:
        raise ValueError("train manifest must be non-empty")
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    if network is None:
        network = build_detector(spec or DetectorSpec())
    if cfg.freeze_backbone:
        network.freeze_backbone()

    data = _DetectionDataset(train, network.anchors, cfg.loss.iou_threshold, loader)
    params = [p for p in network.parameters() if p.requires_grad]
    optimizer = torch.optim.Adam(params, lr=cfg.learning_rate)

    history: list[dict] = []
    for epoch in range(1, cfg.epochs + 1):
        network.train()
        t0 = time.time()
        epoch_loss = 0.0
        order = rng.permutation(len(data))
        for start in range(0, len(data), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            x = torch.from_numpy(np.ascontiguousarray(data.images[idx].astype(np.float32).transpose(0, 3, 1, 2)))
            loc, conf = network(x)
            batch_loss = torch.stack(
                [
                    ssd_loss(
                        loc[i],
                        conf[i],
                        torch.from_numpy(data.offsets[j]),
                        torch.from_numpy(data.labels[j]),
                        cfg.loss,
                    )
                    for i, j in enumerate(idx)
                ]
            ).mean()
            optimizer.zero_grad()
            batch_loss.backward()
            optimizer.step()
            epoch_loss += batch_loss.item() * len(idx)
        mean_loss = epoch_loss / len(data)
        history.append({"epoch": epoch, "loss": mean_loss})
        if log is not None:
            log(f"epoch {epoch}/{cfg.epochs}: loss={mean_loss:.4f} ({time.time() - t0:.1f}s)")

    if out_dir is not None:
        save_detector_checkpoint(out_dir, network, history)
    return network, history


def save_detector_checkpoint(out_dir: str | Path, network: SsdNetwork, history: list[dict] | None = None) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(network.state_dict(), out_dir / "weights.pt")
    (out_dir / "config.json").write_text(
        json.dumps({"detector": json.loads(network.spec.to_json())}, indent=1), encoding="utf-8"
    )
    if history:
        with open(out_dir / "metrics.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(sorted(history[0]))
            for row in history:
                writer.writerow([row[k] for k in sorted(row)])
    return out_dir


def load_detector_checkpoint(ckpt_dir: str | Path) -> SsdNetwork:
    ckpt_dir = Path(ckpt_dir)
    config = json.loads((ckpt_dir / "config.json").read_text(encoding="utf-8"))
    network = SsdNetwork(DetectorSpec(**config["detector"]))
    network.load_state_dict(torch.load(ckpt_dir / "weights.pt", weights_only=True))
    network.eval()
    return network
