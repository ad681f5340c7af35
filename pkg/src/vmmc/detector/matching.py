"""Anchor-to-ground-truth assignment and box offset coding.

Matching is two-sided: every ground-truth box claims its best-IoU anchor
outright (so no ground truth goes unmatched), and any remaining anchor
whose best IoU clears the threshold joins that ground truth's positives.
Everything else is background.

Offsets use the usual center/log-size coding scaled by variances
(0.1 for centers, 0.2 for sizes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..boxes import iou_matrix
from .anchors import AnchorSet

CENTER_VARIANCE = 0.1
SIZE_VARIANCE = 0.2


@dataclass(frozen=True)
class AnchorAssignment:
    gt_index: np.ndarray    # (N,) index into gt list, -1 for background
    max_iou: np.ndarray     # (N,) best IoU of each anchor against any gt

    @property
    def positive_mask(self) -> np.ndarray:
        return self.gt_index >= 0

    @property
    def num_positives(self) -> int:
        return int(self.positive_mask.sum())


def match_anchors(anchors: AnchorSet, gt_boxes: np.ndarray, iou_threshold: float = 0.5) -> AnchorAssignment:
    """Assign anchors to normalized ground-truth corner boxes (M, 4)."""
    if len(anchors) == 0:
        raise ValueError("empty anchor set")
    gt_boxes = np.asarray(gt_boxes, dtype=np.float64).reshape(-1, 4)
    n = len(anchors)
    if gt_boxes.shape[0] == 0:
        return AnchorAssignment(np.full(n, -1, dtype=np.int64), np.zeros(n))

    overlap = iou_matrix(anchors.corners, gt_boxes)  # (N, M)
    gt_index = np.full(n, -1, dtype=np.int64)
    max_iou = overlap.max(axis=1)

    # thresholded matches first
    best_gt = overlap.argmax(axis=1)
    gt_index[max_iou >= iou_threshold] = best_gt[max_iou >= iou_threshold]

    # forced matches: each gt claims its best anchor, best-overlap gts first,
    # never stealing an anchor another gt already claimed by force
    order = np.argsort(-overlap.max(axis=0), kind="stable")
    claimed: set[int] = set()
    for g in order:
        col = overlap[:, g].copy()
        if claimed:
            col[list(claimed)] = -1.0
        a = int(col.argmax())
        claimed.add(a)
        gt_index[a] = g
    return AnchorAssignment(gt_index, max_iou)


def encode_boxes(anchor_centers: np.ndarray, gt_corners: np.ndarray) -> np.ndarray:
    """Regression targets (dx, dy, dw, dh) for gt boxes against anchors."""
    a = np.asarray(anchor_centers, dtype=np.float64)
    g = np.asarray(gt_corners, dtype=np.float64)
    gw = g[:, 2] - g[:, 0]
    gh = g[:, 3] - g[:, 1]
    gcx = g[:, 0] + gw / 2
    gcy = g[:, 1] + gh / 2
    out = np.empty_like(a)
    out[:, 0] = (gcx - a[:, 0]) / (a[:, 2] * CENTER_VARIANCE)
    out[:, 1] = (gcy - a[:, 1]) / (a[:, 3] * CENTER_VARIANCE)
    out[:, 2] = np.log(gw / a[:, 2]) / SIZE_VARIANCE
    out[:, 3] = np.log(gh / a[:, 3]) / SIZE_VARIANCE
    return out


def decode_boxes(anchor_centers: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Inverse of encode_boxes: offsets back to normalized corner boxes."""
    a = np.asarray(anchor_centers, dtype=np.float64)
    o = np.asarray(offsets, dtype=np.float64)
    cx = o[:, 0] * CENTER_VARIANCE * a[:, 2] + a[:, 0]
    cy = o[:, 1] * CENTER_VARIANCE * a[:, 3] + a[:, 1]
    w = np.exp(o[:, 2] * SIZE_VARIANCE) * a[:, 2]
    h = np.exp(o[:, 3] * SIZE_VARIANCE) * a[:, 3]
    out = np.empty_like(o)
    out[:, 0] = cx - w / 2
    out[:, 1] = cy - h / 2
    out[:, 2] = cx + w / 2
    out[:, 3] = cy + h / 2
    return out
