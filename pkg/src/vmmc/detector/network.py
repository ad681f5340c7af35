"""The single-shot detector: backbone feature maps, box/class heads, and
decoding into scored detections.

Two backbones share the head plumbing: ``vgg16`` is the full-size stack
that pre-trained checkpoints target, ``tiny`` is a light six-map stack
with the same grid sizes (38/19/10/5/3/1) for tests and desk-scale runs.
Either way the heads emit 8732 boxes per class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np
import torch
from torch import nn

from ..boxes import BoundingBox
from ..labels import NUM_CLASSES
from .anchors import SSD300_PLAN, AnchorSet, generate_anchors
from .matching import decode_boxes
from .nms import Detection, nms_indices


class L2Norm(nn.Module):
    """Channelwise L2 normalization with a learned scale (used on the
    highest-resolution source map)."""

    def __init__(self, channels: int, initial_scale: float = 20.0):
        super().__init__()
        self.weight = nn.Parameter(torch.full((channels,), float(initial_scale)))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        norm = x.pow(2).sum(dim=1, keepdim=True).clamp_min(1e-10).sqrt()
        return self.weight.view(1, -1, 1, 1) * x / norm


def _conv_bn_relu(
    cin: int, cout: int, k: int = 3, stride: int = 1, padding: int | None = None, norm: bool = True
) -> nn.Sequential:
    if padding is None:
        padding = k // 2
    layers: list[nn.Module] = [nn.Conv2d(cin, cout, k, stride=stride, padding=padding)]
    if norm:
        layers.append(nn.BatchNorm2d(cout))
    layers.append(nn.ReLU(inplace=True))
    return nn.Sequential(*layers)


class TinyBackbone(nn.Module):
    """Six source maps at the canonical grids with small channel counts."""

    source_channels = (32, 48, 48, 48, 32, 32)

    def __init__(self):
        super().__init__()
        self.stage0 = nn.Sequential(
            _conv_bn_relu(3, 16, stride=2),    # 150
            _conv_bn_relu(16, 24, stride=2),   # 75
            _conv_bn_relu(24, 32, stride=2),   # 38
        )
        self.stage1 = _conv_bn_relu(32, 48, stride=2)   # 19
        self.stage2 = _conv_bn_relu(48, 48, stride=2)   # 10
        self.stage3 = _conv_bn_relu(48, 48, stride=2)   # 5
        self.stage4 = _conv_bn_relu(48, 32, stride=2)   # 3
        # no norm on the 1x1 map: a single value per channel cannot be
        # batch-normalized when a batch of one comes through
        self.stage5 = _conv_bn_relu(32, 32, k=3, padding=0, norm=False)  # 1

    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        s0 = self.stage0(x)
        s1 = self.stage1(s0)
        s2 = self.stage2(s1)
        s3 = self.stage3(s2)
        s4 = self.stage4(s3)
        s5 = self.stage5(s4)
        return [s0, s1, s2, s3, s4, s5]


class Vgg16Backbone(nn.Module):
    """VGG-16 trunk with the fc layers recast as convolutions plus the
    extra feature stages; matches the layout pre-trained checkpoints use."""

    source_channels = (512, 1024, 512, 256, 256, 256)

    def __init__(self):
        super().__init__()
        def block(cin, cout, n):
            layers = []
            for i in range(n):
                layers += [nn.Conv2d(cin if i == 0 else cout, cout, 3, padding=1), nn.ReLU(inplace=True)]
            return layers

        self.conv1 = nn.Sequential(*block(3, 64, 2), nn.MaxPool2d(2))
        self.conv2 = nn.Sequential(*block(64, 128, 2), nn.MaxPool2d(2))
        self.conv3 = nn.Sequential(*block(128, 256, 3), nn.MaxPool2d(2, ceil_mode=True))
        self.conv4 = nn.Sequential(*block(256, 512, 3))
        self.l2norm = L2Norm(512)
        self.pool4 = nn.MaxPool2d(2)
        self.conv5 = nn.Sequential(*block(512, 512, 3), nn.MaxPool2d(3, stride=1, padding=1))
        self.fc = nn.Sequential(
            nn.Conv2d(512, 1024, 3, padding=6, dilation=6), nn.ReLU(inplace=True),
            nn.Conv2d(1024, 1024, 1), nn.ReLU(inplace=True),
        )
        self.extra8 = nn.Sequential(
            nn.Conv2d(1024, 256, 1), nn.ReLU(inplace=True),
            nn.Conv2d(256, 512, 3, stride=2, padding=1), nn.ReLU(inplace=True),
        )
        self.extra9 = nn.Sequential(
            nn.Conv2d(512, 128, 1), nn.ReLU(inplace=True),
            nn.Conv2d(128, 256, 3, stride=2, padding=1), nn.ReLU(inplace=True),
        )
        self.extra10 = nn.Sequential(
            nn.Conv2d(256, 128, 1), nn.ReLU(inplace=True),
            nn.Conv2d(128, 256, 3), nn.ReLU(inplace=True),
        )
        self.extra11 = nn.Sequential(
            nn.Conv2d(256, 128, 1), nn.ReLU(inplace=True),
            nn.Conv2d(128, 256, 3), nn.ReLU(inplace=True),
        )

    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        y = self.conv3(self.conv2(self.conv1(x)))
        c4 = self.conv4(y)
        s0 = self.l2norm(c4)
        s1 = self.fc(self.conv5(self.pool4(c4)))
        s2 = self.extra8(s1)
        s3 = self.extra9(s2)
        s4 = self.extra10(s3)
        s5 = self.extra11(s4)
        return [s0, s1, s2, s3, s4, s5]


_BACKBONES = {"tiny": TinyBackbone, "vgg16": Vgg16Backbone}


@dataclass(frozen=True)
class DetectorSpec:
    num_classes: int = NUM_CLASSES  # foreground classes; background is extra
    backbone: str = "vgg16"

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "DetectorSpec":
        return cls(**json.loads(text))


class SsdNetwork(nn.Module):
    def __init__(self, spec: DetectorSpec):
        super().__init__()
        if spec.backbone not in _BACKBONES:
            raise ValueError(f"unknown backbone {spec.backbone!r}")
        self.spec = spec
        self.anchors: AnchorSet = generate_anchors(SSD300_PLAN)
        self.backbone = _BACKBONES[spec.backbone]()
        n_out = spec.num_classes + 1
        self.loc_heads = nn.ModuleList()
        self.conf_heads = nn.ModuleList()
        for channels, layer in zip(self.backbone.source_channels, SSD300_PLAN):
            k = layer.boxes_per_cell
            self.loc_heads.append(nn.Conv2d(channels, 4 * k, 3, padding=1))
            self.conf_heads.append(nn.Conv2d(channels, n_out * k, 3, padding=1))

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """(loc offsets (B, 8732, 4), class logits (B, 8732, C+1))."""
        if x.ndim != 4 or x.shape[1] != 3:
            raise ValueError(f"expected (B, 3, H, W) input, got {tuple(x.shape)}")
        sources = self.backbone(x)
        locs, confs = [], []
        n_out = self.spec.num_classes + 1
        for src, loc_head, conf_head in zip(sources, self.loc_heads, self.conf_heads):
            loc = loc_head(src).permute(0, 2, 3, 1).reshape(x.shape[0], -1, 4)
            conf = conf_head(src).permute(0, 2, 3, 1).reshape(x.shape[0], -1, n_out)
            locs.append(loc)
            confs.append(conf)
        return torch.cat(locs, dim=1), torch.cat(confs, dim=1)

    def freeze_backbone(self) -> None:
        for p in self.backbone.parameters():
            p.requires_grad_(False)

    def load_pretrained_backbone(self, path: str | Path) -> None:
        """Ingest backbone weights from a numpy .npz checkpoint whose array
        names equal the backbone state_dict keys (the documented conversion
        format for externally sourced weights)."""
        archive = np.load(path)
        state = self.backbone.state_dict()
        for key in state:
            if key not in archive:
                raise KeyError(f"checkpoint missing array {key!r}")
            tensor = torch.from_numpy(np.asarray(archive[key]))
            if tuple(tensor.shape) != tuple(state[key].shape):
                raise ValueError(f"shape mismatch for {key}: {tuple(tensor.shape)} vs {tuple(state[key].shape)}")
            state[key] = tensor
        self.backbone.load_state_dict(state)


def build_detector(spec: DetectorSpec | None = None, seed: int | None = None) -> SsdNetwork:
    if seed is not None:
        torch.manual_seed(seed)
    return SsdNetwork(spec or DetectorSpec())


def detect(
    network: SsdNetwork,
    image: np.ndarray | torch.Tensor,
    conf_floor: float = 0.5,
    nms_iou: float = 0.45,
    pre_nms_floor: float = 0.01,
    top_k: int = 200,
) -> list[Detection]:
    """Scored, classed, NMS-filtered boxes for one preprocessed image.

    Output entries carry (prob, class, x_min, y_min, x_max, y_max) with
    normalized coordinates; only detections at or above ``conf_floor``
    are reported.
    """
    if isinstance(image, np.ndarray):
        if image.shape != (300, 300, 3):
            raise ValueError(f"expected (300, 300, 3) input, got {image.shape}")
        x = torch.from_numpy(np.ascontiguousarray(image.transpose(2, 0, 1), dtype=np.float32))[None]
    else:
        x = image
        if x.ndim == 3:
            x = x[None]
        if x.shape[1:] != (3, 300, 300):
            raise ValueError(f"expected (3, 300, 300) input, got {tuple(x.shape[1:])}")
    network.eval()
    with torch.no_grad():
        loc, conf = network(x)
        probs = torch.softmax(conf[0], dim=1).numpy()
    boxes = decode_boxes(network.anchors.centers, loc[0].numpy())
    boxes = np.clip(boxes, 0.0, 1.0)

    results: list[Detection] = []
    for head_class in range(1, network.spec.num_classes + 1):
        p = probs[:, head_class]
        cand = np.where(p >= pre_nms_floor)[0]
        if cand.size == 0:
            continue
        cand_boxes = boxes[cand]
        valid = (cand_boxes[:, 2] > cand_boxes[:, 0]) & (cand_boxes[:, 3] > cand_boxes[:, 1])
        cand, cand_boxes = cand[valid], cand_boxes[valid]
        if cand.size == 0:
            continue
        keep = nms_indices(cand_boxes, p[cand], None, nms_iou)[:top_k]
        for i in keep:
            prob = float(p[cand[i]])
            if prob < conf_floor:
                continue
            x0, y0, x1, y1 = cand_boxes[i]
            results.append(
                Detection(prob, head_class - 1, BoundingBox(float(x0), float(y0), float(x1), float(y1), normalized=True))
            )
    results.sort(key=lambda d: -d.prob)
    return results
