"""Train the residual classifier at desk scale and inspect predictions.

The full-size network (30 weight layers, 1,132,775 trainable parameters)
would take a while here, so this demo trains a slimmed spec for a few
epochs; swap in NetworkSpec() and epochs=100 for the real configuration.
"""

import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from vmmc.classifier import NetworkSpec, TrainConfig, build_network, predict, train_classifier
from vmmc.dataset import SplitSpec, load_manifest, preprocess, split_dataset
from vmmc.labels import label_by_id
from vmmc.synthetic import generate_corpus

workdir = Path(tempfile.mkdtemp(prefix="vmmc_demo_"))
manifest = load_manifest(generate_corpus(workdir, per_class=12, seed=1))
train, val, test = split_dataset(manifest, SplitSpec(seed=0))

full = build_network()
print(f"full network: {full.trainable_parameter_count:,} trainable parameters")

demo_spec = NetworkSpec(stem_filters=8, stages=((16, 8, 1), (32, 16, 1), (32, 16, 1), (64, 32, 0)))
cfg = TrainConfig(batch_size=16, epochs=4, seed=0)
net, history = train_classifier(train, val, cfg, spec=demo_spec, out_dir=workdir / "ckpt", log=print)

record = test.records[0]
with Image.open(test.resolve(record)) as im:
    scores = predict(net, preprocess(np.asarray(im.convert("RGB"))))
print(f"\ntruth: {label_by_id(record.class_id).display_name}")
print("prediction (descending):")
for class_id, prob in scores.ranked()[:3]:
    print(f"  {label_by_id(class_id).display_name:<22} {prob:.3f}")
print(f"\ncheckpoint written to {workdir / 'ckpt'}")
