"""Fine-tune the single-shot detector on annotated boxes and evaluate mAP.

Uses the light test backbone so the demo finishes quickly; pass
DetectorSpec(backbone="vgg16") (optionally after load_pretrained_backbone)
for the full-size model.
"""

import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from vmmc.dataset import SplitSpec, load_manifest, preprocess, split_dataset
from vmmc.dataset.transforms import preprocess_box
from vmmc.detector import DetectorSpec, FineTuneConfig, detect, fine_tune
from vmmc.evaluation import mean_average_precision
from vmmc.synthetic import generate_corpus

workdir = Path(tempfile.mkdtemp(prefix="vmmc_demo_"))
manifest = load_manifest(generate_corpus(workdir, per_class=10, seed=2))
train, _, heldout = split_dataset(manifest, SplitSpec(seed=0, fractions=(0.8, 0.0, 0.2)))
print(f"fine-tuning on {len(train)} box-annotated images")

cfg = FineTuneConfig(epochs=4, batch_size=8, seed=0)
network, history = fine_tune(None, train, cfg, spec=DetectorSpec(backbone="tiny"), log=print)
print(f"loss: {history[0]['loss']:.3f} -> {history[-1]['loss']:.3f}")

detections, ground_truths = [], {}
for record in heldout:
    with Image.open(heldout.resolve(record)) as im:
        image = preprocess(np.asarray(im.convert("RGB")))
    gt = preprocess_box(record.bbox, record.width, record.height)
    ground_truths[record.image_path] = [(gt, record.class_id)]
    for d in detect(network, image, conf_floor=0.0, pre_nms_floor=0.05):
        detections.append((record.image_path, d))

result = mean_average_precision(detections, ground_truths)
print(f"\nheld-out mAP after {cfg.epochs} epochs: {result.mean:.3f}")
print("per-class AP:", {k: None if v is None else round(v, 3) for k, v in result.per_class.items()})
print("(a few epochs on a tiny backbone; expect rough numbers)")
