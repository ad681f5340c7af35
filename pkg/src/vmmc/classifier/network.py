"""The 30-layer residual make-model classifier.

The reference design fixes the depth (30 weight layers) and the trainable
parameter count (1,132,775) but not the per-block filter plan, so the plan
below is a reconstruction chosen to satisfy both exactly:

    stem:    5x5/16 conv, stride 2  -> 150x150, then 3x3 max pool /2 -> 75x75
    stage 1: conv block  (16 -> 32,32,64)  + 1 identity (32,32,64)   @ 38x38
    stage 2: conv block  (64 -> 32,32,128) + 1 identity (32,32,128)  @ 19x19
    stage 3: conv block (128 -> 32,32,128) + 2 identity (32,32,128)  @ 10x10
    stage 4: conv block (128 -> 128,128,256)                         @ 5x5
    head:    global average pool + 7-way fully connected

29 convolutions + 1 fully connected = 30 weight layers; total trainable
parameters = 1,132,775 (conv weights+biases, batch-norm scale+shift, fc).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict, field

import numpy as np
import torch
from torch import nn

from ..labels import NUM_CLASSES
from .blocks import ConvBlockSpec, ConvolutionalBlock, IdentityBlock, IdentityBlockSpec

PARAMETER_COUNT = 1_132_775


@dataclass(frozen=True)
class NetworkSpec:
    stem_filters: int = 16
    stem_kernel: int = 5
    # (out_channels, bottleneck, identity_blocks) per stride-2 stage
    stages: tuple[tuple[int, int, int], ...] = ((64, 32, 1), (128, 32, 1), (128, 32, 2), (256, 128, 0))
    num_classes: int = NUM_CLASSES
    input_size: int = 300

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "NetworkSpec":
        raw = json.loads(text)
        raw["stages"] = tuple(tuple(s) for s in raw["stages"])
        return cls(**raw)


@dataclass(frozen=True)
class ClassScores:
    """Seven (class_id, probability) pairs; probabilities sum to one."""

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self):
        probs = np.array([p for _, p in self.entries])
        if np.any(probs < -1e-9) or np.any(probs > 1 + 1e-9):
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > 1e-5:
            raise ValueError(f"probabilities sum to {probs.sum()}, not 1")

    def prob(self, class_id: int) -> float:
        return dict(self.entries)[class_id]

    def ranked(self) -> tuple[tuple[int, float], ...]:
        return tuple(sorted(self.entries, key=lambda e: (-e[1], e[0])))

    @property
    def top_class(self) -> int:
        return self.ranked()[0][0]

    @property
    def top_prob(self) -> float:
        return self.ranked()[0][1]

    def as_json(self) -> list[dict]:
        return [{"class": c, "prob": p} for c, p in self.ranked()]


class ClassifierNetwork(nn.Module):
    def __init__(self, spec: NetworkSpec):
        super().__init__()
        self.spec = spec
        self.stem = nn.Sequential(
            nn.Conv2d(3, spec.stem_filters, spec.stem_kernel, stride=2, padding=spec.stem_kernel // 2, bias=True),
            nn.BatchNorm2d(spec.stem_filters),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(3, stride=2, padding=1),
        )
        blocks = []
        cin = spec.stem_filters
        for out, bottleneck, n_identity in spec.stages:
            blocks.append(ConvolutionalBlock(ConvBlockSpec(cin, bottleneck, out)))
            for _ in range(n_identity):
                blocks.append(IdentityBlock(IdentityBlockSpec(out, (bottleneck, bottleneck, out))))
            cin = out
        self.blocks = nn.Sequential(*blocks)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.head = nn.Linear(cin, spec.num_classes)

    @property
    def trainable_parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters() if p.requires_grad)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Logits for a (B, 3, H, W) batch."""
        if x.ndim != 4 or x.shape[1] != 3:
            raise ValueError(f"expected (B, 3, H, W) input, got {tuple(x.shape)}")
        y = self.stem(x)
        y = self.blocks(y)
        y = self.pool(y).flatten(1)
        return self.head(y)

    @torch.no_grad()
    def probabilities(self, x: torch.Tensor) -> torch.Tensor:
        self.eval()
        return torch.softmax(self.forward(x), dim=1)


def _he_init(module: nn.Module) -> None:
    for m in module.modules():
        if isinstance(m, nn.Conv2d):
            nn.init.kaiming_normal_(m.weight, nonlinearity="relu")
            if m.bias is not None:
                nn.init.zeros_(m.bias)
        elif isinstance(m, nn.Linear):
            nn.init.kaiming_normal_(m.weight, nonlinearity="relu")
            nn.init.zeros_(m.bias)


def build_network(spec: NetworkSpec | None = None, seed: int | None = None) -> ClassifierNetwork:
    """Construct the classifier; the default spec reports exactly 1,132,775
    trainable parameters."""
    if seed is not None:
        torch.manual_seed(seed)
    net = ClassifierNetwork(spec or NetworkSpec())
    _he_init(net)
    return net


def image_to_tensor(image: np.ndarray) -> torch.Tensor:
    """Preprocessed HxWx3 [0,1] image (or BxHxWx3 batch) to an NCHW tensor."""
    arr = np.asarray(image, dtype=np.float32)
    if arr.ndim == 3:
        arr = arr[None]
    if arr.ndim != 4 or arr.shape[3] != 3:
        raise ValueError(f"expected HxWx3 or BxHxWx3, got {arr.shape}")
    return torch.from_numpy(np.ascontiguousarray(arr.transpose(0, 3, 1, 2)))


def predict(network: ClassifierNetwork, image: np.ndarray) -> ClassScores:
    """Class probabilities for one preprocessed 300x300x3 image."""
    size = network.spec.input_size
    arr = np.asarray(image)
    if arr.shape != (size, size, 3):
        raise ValueError(f"expected ({size}, {size}, 3) input, got {arr.shape}")
    probs = network.probabilities(image_to_tensor(arr))[0].numpy()
    probs = probs / probs.sum()  # guard against float32 drift
    return ClassScores(tuple((i, float(p)) for i, p in enumerate(probs)))
