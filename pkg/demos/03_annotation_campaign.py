"""A semi-automatic annotation campaign with human review.

A stub car detector proposes boxes; images whose biggest car clears the
size threshold are annotated automatically, the rest queue up for the
annotator, who labels or deletes them. The consolidated CSV round-trips
through the manifest loader.
"""

import tempfile
from pathlib import Path

import numpy as np

from vmmc.annotation import AnnotationConfig, AnnotationStore, Delete, Label, run_campaign
from vmmc.annotation.store import DetectionCandidate
from vmmc.boxes import BoundingBox
from vmmc.dataset import load_manifest
from vmmc.synthetic import generate_image
from PIL import Image

workdir = Path(tempfile.mkdtemp(prefix="vmmc_demo_"))
rng = np.random.default_rng(0)

# three class folders; half the vehicles are small enough to need review
true_boxes = {}
for class_id in range(3):
    folder = workdir / f"class_{class_id}"
    folder.mkdir()
    for i in range(6):
        img, bbox = generate_image(rng, class_id, width=160, height=120)
        path = folder / f"im{i}.png"
        img.save(path)
        true_boxes[str(path)] = bbox


def detector(image, path=None):
    box = true_boxes[str(path)]
    return [DetectionCandidate(box, confidence=0.92)]


store = AnnotationStore(workdir / "campaign_store")
cfg = AnnotationConfig(certain_size=0.12, detector_confidence_threshold=0.5)
run_campaign([workdir / f"class_{c}" for c in range(3)], detector, cfg, store=store, root=workdir)

stats = store.stats()
print(f"auto-annotated: {stats['auto_rows']}, queued for review: {stats['pending']}")

# the annotator works the queue: label most, delete the odd bad frame
while True:
    item = store.lease_next()
    if item is None:
        break
    if item.best_candidate is not None:
        store.apply_decision(item, Label(int(item.image_path.split("_")[1][0]), item.best_candidate.bbox))
    else:
        store.apply_decision(item, Delete())

print(f"after review: {store.stats()}")

csv_path = store.export_csv(workdir / "annotations.csv")
manifest = load_manifest(csv_path)
print(f"exported {len(manifest)} rows to {csv_path}")
print("sources:", {s: sum(1 for r in manifest if r.source == s) for s in ('auto', 'human')})
