"""Corpus schema, splitting, preprocessing, and augmentation."""

from .manifest import (
    MANIFEST_HEADER,
    DatasetManifest,
    ImageRecord,
    ManifestError,
    format_rows,
    ingest_directory,
    load_manifest,
    save_manifest,
    with_bbox,
)
from .splits import SplitError, SplitSpec, split_dataset
from .transforms import INPUT_SIZE, AugmentationConfig, augment, preprocess

__all__ = [
    "MANIFEST_HEADER",
    "DatasetManifest",
    "ImageRecord",
    "ManifestError",
    "format_rows",
    "ingest_directory",
    "load_manifest",
    "save_manifest",
    "with_bbox",
    "SplitError",
    "SplitSpec",
    "split_dataset",
    "INPUT_SIZE",
    "AugmentationConfig",
    "augment",
    "preprocess",
]
