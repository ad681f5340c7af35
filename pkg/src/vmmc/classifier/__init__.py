"""Residual make-model classifier: blocks, network, training."""

from .blocks import ConvBlockSpec, ConvolutionalBlock, IdentityBlock, IdentityBlockSpec
from .network import (
    PARAMETER_COUNT,
    ClassScores,
    ClassifierNetwork,
    NetworkSpec,
    build_network,
    image_to_tensor,
    predict,
)
from .training import (
    EpochMetrics,
    TrainConfig,
    evaluate_classifier,
    file_loader,
    load_checkpoint,
    save_checkpoint,
    train_classifier,
)

__all__ = [
    "ConvBlockSpec",
    "ConvolutionalBlock",
    "IdentityBlock",
    "IdentityBlockSpec",
    "PARAMETER_COUNT",
    "ClassScores",
    "ClassifierNetwork",
    "NetworkSpec",
    "build_network",
    "image_to_tensor",
    "predict",
    "EpochMetrics",
    "TrainConfig",
    "evaluate_classifier",
    "file_loader",
    "load_checkpoint",
    "save_checkpoint",
    "train_classifier",
]
