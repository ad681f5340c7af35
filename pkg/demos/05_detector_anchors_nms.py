"""Detector building blocks: default boxes, IoU, matching, NMS, Smooth L1.

The 300x300 layer plan yields exactly 8732 default boxes per class.
Greedy NMS keeps the best-scored box of each overlapping same-class group.
"""

import numpy as np

from vmmc.boxes import BoundingBox, iou
from vmmc.detector import (
    Detection,
    SSD300_PLAN,
    generate_anchors,
    match_anchors,
    nms,
    smooth_l1,
)
import torch

anchors = generate_anchors()
print(f"default boxes: {len(anchors)}")
for plan in SSD300_PLAN:
    print(f"  grid {plan.grid:>2}x{plan.grid:<2}  {plan.boxes_per_cell} boxes/cell "
          f"-> {plan.grid ** 2 * plan.boxes_per_cell}")

a = BoundingBox(0, 0, 2, 2)
b = BoundingBox(1, 0, 3, 2)
print(f"\niou((0,0,2,2), (1,0,3,2)) = {iou(a, b):.4f} (areas 4 and 4, overlap 2)")

gt = np.array([[0.42, 0.42, 0.58, 0.58]])
assignment = match_anchors(anchors, gt, iou_threshold=0.5)
print(f"anchors matched to a centered ground-truth box: {assignment.num_positives}")

dets = [
    Detection(0.9, 0, BoundingBox(0.10, 0.10, 0.30, 0.30, normalized=True)),
    Detection(0.8, 0, BoundingBox(0.11, 0.10, 0.31, 0.30, normalized=True)),  # overlaps the first
    Detection(0.7, 0, BoundingBox(0.60, 0.60, 0.80, 0.80, normalized=True)),
    Detection(0.6, 1, BoundingBox(0.10, 0.10, 0.30, 0.30, normalized=True)),  # other class survives
]
kept = nms(dets, iou_threshold=0.45)
print(f"\nnms kept {len(kept)} of {len(dets)} detections:")
for d in kept:
    print(f"  prob={d.prob:.2f} class={d.class_id} box={tuple(round(v, 2) for v in d.bbox.as_tuple())}")

x = torch.tensor([0.0, 0.5, 1.0, 2.0])
print(f"\nsmooth L1 at {x.tolist()} = {smooth_l1(x).tolist()}")
