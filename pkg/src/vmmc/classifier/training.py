"""Classifier training loop, checkpoints, and the per-epoch metrics log.

Categorical cross entropy on logits, Adam at 1e-3, online augmentation
with per-image draws, and best-validation-accuracy checkpoint selection.
Checkpoint directories hold weights.pt + config.json + metrics.csv.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Callable

import numpy as np
import torch
from PIL import Image
from torch import nn

from ..dataset import AugmentationConfig, DatasetManifest, ImageRecord, augment, preprocess
from .network import ClassifierNetwork, NetworkSpec, build_network, image_to_tensor

# Maps a record to the raw HxWx3 uint8 image that feeds preprocess();
# the default reads the manifest-relative file. Experiment II swaps in a
# detector-cropping loader here.
ImageLoader = Callable[[DatasetManifest, ImageRecord], np.ndarray]


def file_loader(manifest: DatasetManifest, record: ImageRecord) -> np.ndarray:
    with Image.open(manifest.resolve(record)) as im:
        return np.asarray(im.convert("RGB"))


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    epochs: int = 100
    learning_rate: float = 1e-3
    seed: int = 0
    augmentation: AugmentationConfig | None = field(default_factory=AugmentationConfig)
    loss: str = "categorical_cross_entropy"

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")
        if self.loss != "categorical_cross_entropy":
            raise ValueError(f"unsupported loss {self.loss!r}")


@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float


class _ArrayDataset:
    """Preprocessed images cached in RAM (float16) with integer labels."""

    def __init__(self, manifest: DatasetManifest, loader: ImageLoader):
        self.images = np.stack([preprocess(loader(manifest, r)) for r in manifest]).astype(np.float16)
        self.labels = np.array([r.class_id for r in manifest], dtype=np.int64)

    def __len__(self):
        return len(self.labels)


def _batches(n: int, batch_size: int, rng: np.random.Generator | None):
    order = rng.permutation(n) if rng is not None else np.arange(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def _forward_metrics(net: ClassifierNetwork, data: _ArrayDataset, batch_size: int) -> tuple[float, float]:
    net.eval()
    total_loss, correct = 0.0, 0
    with torch.no_grad():
        for idx in _batches(len(data), batch_size, rng=None):
            x = image_to_tensor(data.images[idx].astype(np.float32))
            y = torch.from_numpy(data.labels[idx])
            logits = net(x)
            total_loss += nn.functional.cross_entropy(logits, y, reduction="sum").item()
            correct += (logits.argmax(1) == y).sum().item()
    n = len(data)
    return total_loss / n, correct / n


def train_classifier(
    train: DatasetManifest,
    val: DatasetManifest,
    cfg: TrainConfig,
    spec: NetworkSpec | None = None,
    out_dir: str | Path | None = None,
    loader: ImageLoader = file_loader,
    log: Callable[[str], None] | None = None,
) -> tuple[ClassifierNetwork, list[EpochMetrics]]:
    """Train on ``train``, select the best-validation-accuracy epoch, and
    return that checkpoint plus the full metrics log.

    Raises ValueError when the validation split contains a class that the
    train split never shows (an empty class cannot be learned).
    """
    if len(train) == 0 or len(val) == 0:
        raise ValueError("train and val manifests must be non-empty")
    missing = set(val.class_counts) - set(train.class_counts)
    if missing:
        raise ValueError(f"classes {sorted(missing)} are empty in the train split")

    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    net = build_network(spec)
    optimizer = torch.optim.Adam(net.parameters(), lr=cfg.learning_rate)

    train_data = _ArrayDataset(train, loader)
    val_data = _ArrayDataset(val, loader)

    history: list[EpochMetrics] = []
    best_acc, best_state = -1.0, None
    for epoch in range(1, cfg.epochs + 1):
        net.train()
        t0 = time.time()
        epoch_loss, epoch_correct = 0.0, 0
        for idx in _batches(len(train_data), cfg.batch_size, rng):
            imgs = train_data.images[idx].astype(np.float32)
            if cfg.augmentation is not None:
                imgs = np.stack([augment(im, cfg.augmentation, rng=rng) for im in imgs])
            x = image_to_tensor(imgs)
            y = torch.from_numpy(train_data.labels[idx])
            logits = net(x)
            loss = nn.functional.cross_entropy(logits, y)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_loss += loss.item() * len(idx)
            epoch_correct += (logits.argmax(1) == y).sum().item()
        train_loss = epoch_loss / len(train_data)
        train_acc = epoch_correct / len(train_data)
        val_loss, val_acc = _forward_metrics(net, val_data, cfg.batch_size)
        history.append(EpochMetrics(epoch, train_loss, train_acc, val_loss, val_acc))
        if val_acc > best_acc:
            best_acc = val_acc
            best_state = {k: v.detach().clone() for k, v in net.state_dict().items()}
        if log is not None:
            log(
                f"epoch {epoch}/{cfg.epochs}: train_loss={train_loss:.4f} train_acc={train_acc:.3f} "
                f"val_loss={val_loss:.4f} val_acc={val_acc:.3f} ({time.time() - t0:.1f}s)"
            )

    if best_state is not None:
        net.load_state_dict(best_state)
    if out_dir is not None:
        save_checkpoint(out_dir, net, cfg, history)
    return net, history


def evaluate_classifier(
    net: ClassifierNetwork,
    manifest: DatasetManifest,
    batch_size: int = 32,
    loader: ImageLoader = file_loader,
) -> tuple[float, np.ndarray, np.ndarray]:
    """(accuracy, predictions, truths) over a manifest."""
    data = _ArrayDataset(manifest, loader)
    net.eval()
    preds = []
    with torch.no_grad():
        for idx in _batches(len(data), batch_size, rng=None):
            logits = net(image_to_tensor(data.images[idx].astype(np.float32)))
            preds.append(logits.argmax(1).numpy())
    preds = np.concatenate(preds)
    acc = float((preds == data.labels).mean())
    return acc, preds, data.labels


def save_checkpoint(
    out_dir: str | Path,
    net: ClassifierNetwork,
    cfg: TrainConfig | None = None,
    history: list[EpochMetrics] | None = None,
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(net.state_dict(), out_dir / "weights.pt")
    config = {"network": json.loads(net.spec.to_json())}
    if cfg is not None:
        raw = asdict(cfg)
        config["train"] = raw
    (out_dir / "config.json").write_text(json.dumps(config, indent=1), encoding="utf-8")
    if history is not None:
        with open(out_dir / "metrics.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["epoch", "train_loss", "train_acc", "val_loss", "val_acc"])
            for m in history:
                writer.writerow([m.epoch, m.train_loss, m.train_acc, m.val_loss, m.val_acc])
    return out_dir


def load_checkpoint(ckpt_dir: str | Path) -> ClassifierNetwork:
    ckpt_dir = Path(ckpt_dir)
    config = json.loads((ckpt_dir / "config.json").read_text(encoding="utf-8"))
    spec = NetworkSpec.from_json(json.dumps(config["network"]))
    net = ClassifierNetwork(spec)
    net.load_state_dict(torch.load(ckpt_dir / "weights.pt", weights_only=True))
    net.eval()
    return net
