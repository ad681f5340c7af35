"""Default-box (anchor) generation for the 300x300 single-shot detector.

Six feature maps contribute boxes: grids 38/19/10/5/3/1 with 4, 6, 6, 6,
4, 4 boxes per cell, which totals exactly 8732 per class. Each cell gets
two square boxes (its own scale and the geometric mean with the next
scale) plus a pair of boxes per extra aspect ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LayerPlan:
    grid: int                       # cells per side
    step: float                     # pixels between cell centers
    scale: float                    # box side in pixels at ratio 1
    next_scale: float               # scale of the following layer
    aspect_ratios: tuple[float, ...]  # extra ratios; each adds ar and 1/ar

    @property
    def boxes_per_cell(self) -> int:
        return 2 + 2 * len(self.aspect_ratios)


SSD300_PLAN: tuple[LayerPlan, ...] = (
    LayerPlan(38, 8, 30, 60, (2.0,)),
    LayerPlan(19, 16, 60, 111, (2.0, 3.0)),
    LayerPlan(10, 32, 111, 162, (2.0, 3.0)),
    LayerPlan(5, 64, 162, 213, (2.0, 3.0)),
    LayerPlan(3, 100, 213, 264, (2.0,)),
    LayerPlan(1, 300, 264, 315, (2.0,)),
)

INPUT_SIZE = 300


@dataclass(frozen=True)
class AnchorSet:
    layers: tuple[LayerPlan, ...]
    centers: np.ndarray = field(repr=False)  # (N, 4) cx, cy, w, h, normalized
    corners: np.ndarray = field(repr=False)  # (N, 4) x0, y0, x1, y1, normalized

    def __len__(self) -> int:
        return self.centers.shape[0]

    def clipped(self) -> np.ndarray:
        """Corner boxes clipped to the unit square."""
        return np.clip(self.corners, 0.0, 1.0)


def generate_anchors(plan: tuple[LayerPlan, ...] = SSD300_PLAN, input_size: int = INPUT_SIZE) -> AnchorSet:
    """All default boxes for a layer plan, flattened layer-major then
    row-major then per-cell box order."""
    boxes = []
    for layer in plan:
        s = layer.scale / input_size
        s_prime = math.sqrt(layer.scale * layer.next_scale) / input_size
        shapes = [(s, s), (s_prime, s_prime)]
        for ar in layer.aspect_ratios:
            r = math.sqrt(ar)
            shapes.append((s * r, s / r))
            shapes.append((s / r, s * r))
        for i in range(layer.grid):
            cy = (i + 0.5) * layer.step / input_size
            for j in range(layer.grid):
                cx = (j + 0.5) * layer.step / input_size
                for w, h in shapes:
                    boxes.append((cx, cy, w, h))
    centers = np.asarray(boxes, dtype=np.float64)
    corners = np.empty_like(centers)
    corners[:, 0] = centers[:, 0] - centers[:, 2] / 2
    corners[:, 1] = centers[:, 1] - centers[:, 3] / 2
    corners[:, 2] = centers[:, 0] + centers[:, 2] / 2
    corners[:, 3] = centers[:, 1] + centers[:, 3] / 2
    return AnchorSet(tuple(plan), centers, corners)
