"""Single-shot detection stack: anchors, matching, losses, NMS, network."""

from ..boxes import BoundingBox, iou, iou_matrix
from .anchors import INPUT_SIZE, SSD300_PLAN, AnchorSet, LayerPlan, generate_anchors
from .cars import ManifestCarDetector, SidecarCarDetector, SsdCarDetector
from .losses import DetectorLossConfig, smooth_l1, ssd_loss
from .matching import (
    AnchorAssignment,
    decode_boxes,
    encode_boxes,
    match_anchors,
)
from .network import DetectorSpec, SsdNetwork, TinyBackbone, Vgg16Backbone, build_detector, detect
from .nms import Detection, nms, nms_indices
from .training import (
    FineTuneConfig,
    fine_tune,
    load_detector_checkpoint,
    save_detector_checkpoint,
)

__all__ = [
    "BoundingBox",
    "iou",
    "iou_matrix",
    "INPUT_SIZE",
    "SSD300_PLAN",
    "AnchorSet",
    "LayerPlan",
    "generate_anchors",
    "ManifestCarDetector",
    "SidecarCarDetector",
    "SsdCarDetector",
    "DetectorLossConfig",
    "smooth_l1",
    "ssd_loss",
    "AnchorAssignment",
    "decode_boxes",
    "encode_boxes",
    "match_anchors",
    "DetectorSpec",
    "SsdNetwork",
    "TinyBackbone",
    "Vgg16Backbone",
    "build_detector",
    "detect",
    "Detection",
    "nms",
    "nms_indices",
    "FineTuneConfig",
    "fine_tune",
    "load_detector_checkpoint",
    "save_detector_checkpoint",
]
