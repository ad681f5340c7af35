"""Detector loss: Smooth L1 localization + softmax classification with
hard-negative mining.

Smooth L1 is x^2/2 below unit residual and |x| - 1/2 above, so it is
continuous with a continuous derivative at the seam. Classification is
cross entropy over (background + foreground classes); negatives are mined
hardest-first at ``neg_pos_ratio`` negatives per positive. Both terms are
normalized by the positive count.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch


@dataclass(frozen=True)
class DetectorLossConfig:
    iou_threshold: float = 0.5
    neg_pos_ratio: float = 3.0
    loc_weight: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.iou_threshold < 1.0:
            raise ValueError("iou_threshold must be in (0, 1)")
        if self.neg_pos_ratio < 1.0:
            raise ValueError("neg_pos_ratio must be >= 1")


def smooth_l1(x: torch.Tensor) -> torch.Tensor:
    """Elementwise Smooth L1: x^2/2 for |x| < 1, |x| - 0.5 otherwise."""
    absx = x.abs()
    return torch.where(absx < 1.0, 0.5 * x * x, absx - 0.5)


def ssd_loss(
    loc_pred: torch.Tensor,       # (N, 4) predicted offsets
    conf_logits: torch.Tensor,    # (N, C+1) class logits, 0 = background
    target_offsets: torch.Tensor, # (N, 4) encoded gt offsets (positives only used)
    target_labels: torch.Tensor,  # (N,) long, 0 = background, 1..C foreground
    cfg: DetectorLossConfig = DetectorLossConfig(),
) -> torch.Tensor:
    """Combined detection loss for one image's anchor grid."""
    positive = target_labels > 0
    n_pos = int(positive.sum().item())

    ce = torch.nn.functional.cross_entropy(conf_logits, target_labels, reduction="none")

    n_neg = min(int(cfg.neg_pos_ratio * n_pos), int((~positive).sum().item()))
    if n_pos == 0 and n_neg == 0:
        raise ValueError("no positive and no negative anchors selected")

    conf_loss = ce[positive].sum()
    if n_neg > 0:
        neg_ce = ce[~positive]
        hardest = torch.topk(neg_ce, n_neg).values
        conf_loss = conf_loss + hardest.sum()

    if n_pos > 0:
        residual = loc_pred[positive] - target_offsets[positive]
        loc_loss = smooth_l1(residual).sum()
    else:
        loc_loss = loc_pred.sum() * 0.0

    denom = max(n_pos, 1)
    return (conf_loss + cfg.loc_weight * loc_loss) / denom
