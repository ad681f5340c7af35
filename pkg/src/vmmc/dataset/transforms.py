"""Image preprocessing and training-time augmentation.

Preprocessing: center zero-pad to square, resize to 300x300, intensities
scaled to [0, 1]. Augmentation: horizontal flip, Gaussian blur, Gaussian
noise, and zoom, each driven by a seeded generator so a (image, config)
pair always produces the same output.
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np
from scipy import ndimage

from ..boxes import BoundingBox, clip_to_frame

INPUT_SIZE = 300


def preprocess(image: np.ndarray, size: int = INPUT_SIZE) -> np.ndarray:
    """Zero-pad to square (centered), resize to ``size``, scale to [0, 1].

    Integer inputs are divided by their dtype's max (255 for uint8); float
    inputs are assumed to be scaled already, which makes the function
    idempotent on its own output.
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"expected HxWx3 input, got shape {image.shape}")
    h, w = image.shape[:2]
    if h < 1 or w < 1:
        raise ValueError("empty image")

    if np.issubdtype(image.dtype, np.integer):
        scale = float(np.iinfo(image.dtype).max)
        img = image.astype(np.float32) / scale
    else:
        img = image.astype(np.float32, copy=True)

    side = max(h, w)
    if side != h or side != w:
        pad_top = (side - h) // 2
        pad_left = (side - w) // 2
        img = np.pad(
            img,
            ((pad_top, side - h - pad_top), (pad_left, side - w - pad_left), (0, 0)),
            mode="constant",
        )
    if side != size:
        img = cv2.resize(img, (size, size), interpolation=cv2.INTER_LINEAR)
    return np.ascontiguousarray(img, dtype=np.float32)


def preprocess_box(bbox: BoundingBox, width: int, height: int) -> BoundingBox:
    """Map a pixel-space box through the pad-to-square geometry of
    ``preprocess`` into normalized model-input coordinates."""
    if bbox.normalized:
        raise ValueError("expected a pixel-space box")
    side = max(width, height)
    pad_left = (side - width) // 2
    pad_top = (side - height) // 2
    return BoundingBox(
        (bbox.x_min + pad_left) / side,
        (bbox.y_min + pad_top) / side,
        (bbox.x_max + pad_left) / side,
        (bbox.y_max + pad_top) / side,
        normalized=True,
    )


def unpreprocess_box(bbox: BoundingBox, width: int, height: int) -> BoundingBox | None:
    """Inverse of preprocess_box: normalized model coords back to pixels
    of the original image. None when the box lies entirely in the padding
    bands and nothing of it intersects the actual image."""
    if not bbox.normalized:
        raise ValueError("expected a normalized box")
    side = max(width, height)
    pad_left = (side - width) // 2
    pad_top = (side - height) // 2
    raw = BoundingBox(
        bbox.x_min * side - pad_left,
        bbox.y_min * side - pad_top,
        bbox.x_max * side - pad_left,
        bbox.y_max * side - pad_top,
        normalized=False,
    )
    return clip_to_frame(raw, width, height)


@dataclass(frozen=True)
class AugmentationConfig:
    flip_prob: float = 0.5
    blur_sigma_range: tuple[float, float] = (0.0, 1.5)
    noise_stddev: float = 0.05
    zoom_range: tuple[float, float] = (0.9, 1.1)
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ValueError("flip_prob must be in [0, 1]")
        for name, (lo, hi) in (("blur_sigma_range", self.blur_sigma_range), ("zoom_range", self.zoom_range)):
            if lo > hi:
                raise ValueError(f"{name} must satisfy lo <= hi")
        if self.noise_stddev < 0:
            raise ValueError("noise_stddev must be >= 0")

    @classmethod
    def disabled(cls) -> "AugmentationConfig":
        return cls(flip_prob=0.0, blur_sigma_range=(0.0, 0.0), noise_stddev=0.0, zoom_range=(1.0, 1.0))


def _zoom(img: np.ndarray, factor: float) -> np.ndarray:
    size = img.shape[0]
    scaled = max(1, int(round(size * factor)))
    if scaled == size:
        return img
    resized = cv2.resize(img, (scaled, scaled), interpolation=cv2.INTER_LINEAR)
    if scaled > size:  # zoom in: center crop
        off = (scaled - size) // 2
        return resized[off : off + size, off : off + size]
    out = np.zeros_like(img)  # zoom out: center paste on zeros
    off = (size - scaled) // 2
    out[off : off + scaled, off : off + scaled] = resized
    return out


def augment(image: np.ndarray, cfg: AugmentationConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Apply flip / blur / noise / zoom; output stays 300x300x3 in [0, 1].

    Deterministic given cfg.rng_seed. Pass an external ``rng`` to draw
    per-image variation inside a training loop.
    """
    img = np.asarray(image, dtype=np.float32)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected HxWx3 input, got shape {img.shape}")
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)

    # Draw order is fixed so the same seed replays the same transform chain.
    if rng.random() < cfg.flip_prob:
        img = img[:, ::-1, :]

    sigma = rng.uniform(*cfg.blur_sigma_range)
    if sigma > 1e-6:
        img = ndimage.gaussian_filter(img, sigma=(sigma, sigma, 0.0))

    if cfg.noise_stddev > 0:
        img = img + rng.normal(0.0, cfg.noise_stddev, size=img.shape).astype(np.float32)

    factor = rng.uniform(*cfg.zoom_range)
    if abs(factor - 1.0) > 1e-6:
        img = _zoom(np.ascontiguousarray(img), factor)

    return np.clip(img, 0.0, 1.0, out=np.ascontiguousarray(img, dtype=np.float32))
