"""Residual building blocks.

Identity blocks keep shape: three stride-1 conv sections whose output is
added back onto the block input before the final rectifier,
y = relu(F(x, W) + x). Convolutional blocks halve the spatial dims: the
first main section and the 1x1 projection shortcut run at stride 2, the
first two sections share a filter count, and the third matches the
shortcut, y = relu(F(x, W) + W_s x).

Each section is conv (with bias) -> batch norm -> ReLU, except the last
section of a branch, whose ReLU is deferred until after the residual add.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn


@dataclass(frozen=True)
class IdentityBlockSpec:
    in_channels: int
    filters: tuple[int, int, int]
    kernel_size: int = 3

    def __post_init__(self):
        if any(f <= 0 for f in self.filters):
            raise ValueError("filters must be positive")
        if self.filters[2] != self.in_channels:
            raise ValueError(
                f"identity block must preserve channels: last section has {self.filters[2]} "
                f"filters but input has {self.in_channels}"
            )


@dataclass(frozen=True)
class ConvBlockSpec:
    in_channels: int
    bottleneck: int      # filter count of main sections 1 and 2
    out_channels: int    # filter count of main section 3 and the shortcut
    kernel_size: int = 3

    def __post_init__(self):
        if self.bottleneck <= 0 or self.out_channels <= 0:
            raise ValueError("filter counts must be positive")

    @property
    def filters(self) -> tuple[int, int, int]:
        return (self.bottleneck, self.bottleneck, self.out_channels)


def _conv_bn(cin: int, cout: int, k: int, stride: int = 1) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(cin, cout, k, stride=stride, padding=k // 2, bias=True),
        nn.BatchNorm2d(cout),
    )


class IdentityBlock(nn.Module):
    def __init__(self, spec: IdentityBlockSpec):
        super().__init__()
        self.spec = spec
        f1, f2, f3 = spec.filters
        k = spec.kernel_size
        self.section1 = _conv_bn(spec.in_channels, f1, k)
        self.section2 = _conv_bn(f1, f2, k)
        self.section3 = _conv_bn(f2, f3, k)
        self.relu = nn.ReLU(inplace=True)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[1] != self.spec.in_channels:
            raise ValueError(f"expected {self.spec.in_channels} input channels, got {x.shape[1]}")
        y = self.relu(self.section1(x))
        y = self.relu(self.section2(y))
        y = self.section3(y)
        return self.relu(y + x)


class ConvolutionalBlock(nn.Module):
    def __init__(self, spec: ConvBlockSpec):
        super().__init__()
        self.spec = spec
        f, _, out = spec.filters
        k = spec.kernel_size
        self.section1 = _conv_bn(spec.in_channels, f, k, stride=2)
        self.section2 = _conv_bn(f, f, k)
        self.section3 = _conv_bn(f, out, k)
        self.shortcut = _conv_bn(spec.in_channels, out, 1, stride=2)
        self.relu = nn.ReLU(inplace=True)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[1] != self.spec.in_channels:
            raise ValueError(f"expected {self.spec.in_channels} input channels, got {x.shape[1]}")
        y = self.relu(self.section1(x))
        y = self.relu(self.section2(y))
        y = self.section3(y)
        return self.relu(y + self.shortcut(x))
