"""Desk-scale synthetic corpus: seven vehicle archetypes on cluttered
backgrounds, with ground-truth boxes in the manifest.

Stands in for the real crawled corpus, which is out of reach here: same
schema, same class structure, small enough to train on a laptop CPU. Each
class pairs a distinct silhouette with a distinct paint color so the
classes are learnable full-frame yet benefit from detector crops.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from .boxes import BoundingBox
from .dataset import DatasetManifest, ImageRecord, save_manifest

# (base RGB paint, body style) per class id
ARCHETYPES = (
    ((200, 40, 40), "sedan"),
    ((40, 80, 200), "hatchback"),
    ((40, 160, 60), "wagon"),
    ((220, 200, 40), "compact"),
    ((150, 60, 180), "pickup"),
    ((40, 190, 190), "van"),
    ((230, 130, 30), "bus"),
)

_CLUTTER_COLORS = [(105, 105, 100), (130, 125, 115), (90, 100, 110), (120, 110, 95), (140, 140, 130)]


def _jitter_color(rng: np.random.Generator, rgb: tuple[int, int, int], spread: int = 30) -> tuple[int, int, int]:
    return tuple(int(np.clip(c + rng.integers(-spread, spread + 1), 0, 255)) for c in rgb)


def _draw_vehicle(draw: ImageDraw.ImageDraw, style: str, color, x0: int, y0: int, w: int, h: int) -> None:
    body_top = y0 + int(h * 0.35)
    wheel_r = max(2, int(h * 0.16))
    window = (190, 215, 235)
    dark = tuple(int(c * 0.55) for c in color)

    if style == "sedan":
        draw.rectangle([x0, body_top, x0 + w, y0 + h - wheel_r], fill=color)
        draw.polygon([(x0 + w * 0.2, body_top), (x0 + w * 0.35, y0), (x0 + w * 0.75, y0), (x0 + w * 0.85, body_top)], fill=color)
        draw.polygon([(x0 + w * 0.38, y0 + h * 0.08), (x0 + w * 0.72, y0 + h * 0.08), (x0 + w * 0.78, body_top), (x0 + w * 0.3, body_top)], fill=window)
    elif style == "hatchback":
        draw.rectangle([x0, body_top, x0 + w, y0 + h - wheel_r], fill=color)
        draw.polygon([(x0 + w * 0.25, body_top), (x0 + w * 0.4, y0), (x0 + w * 0.95, y0), (x0 + w, body_top)], fill=color)
        draw.ellipse([x0 + w * 0.45, y0 + h * 0.05, x0 + w * 0.9, body_top + h * 0.05], fill=window)
    elif style == "wagon":
        draw.rectangle([x0, body_top, x0 + w, y0 + h - wheel_r], fill=color)
        draw.rectangle([x0 + w * 0.15, y0, x0 + w * 0.95, body_top], fill=color)
        for i in range(3):
            wx = x0 + w * (0.22 + 0.25 * i)
            draw.rectangle([wx, y0 + h * 0.08, wx + w * 0.18, body_top], fill=window)
    elif style == "compact":
        draw.rounded_rectangle([x0, y0 + int(h * 0.2), x0 + w, y0 + h - wheel_r], radius=max(2, w // 8), fill=color)
        draw.ellipse([x0 + w * 0.25, y0, x0 + w * 0.75, y0 + h * 0.5], fill=color)
        draw.ellipse([x0 + w * 0.35, y0 + h * 0.08, x0 + w * 0.65, y0 + h * 0.38], fill=window)
    elif style == "pickup":
        draw.rectangle([x0, body_top, x0 + w, y0 + h - wheel_r], fill=color)
        draw.rectangle([x0 + w * 0.55, y0, x0 + w * 0.9, body_top], fill=color)
        draw.rectangle([x0 + w * 0.6, y0 + h * 0.08, x0 + w * 0.85, body_top], fill=window)
        draw.rectangle([x0 + w * 0.02, body_top - h * 0.12, x0 + w * 0.5, body_top], fill=dark)
    elif style == "van":
        draw.rectangle([x0, y0, x0 + w, y0 + h - wheel_r], fill=color)
        draw.rectangle([x0 + w * 0.66, y0 + h * 0.1, x0 + w * 0.94, y0 + h * 0.45], fill=window)
        draw.rectangle([x0 + w * 0.06, y0 + h * 0.1, x0 + w * 0.3, y0 + h * 0.45], fill=window)
    else:  # bus
        draw.rectangle([x0, y0, x0 + w, y0 + h - wheel_r], fill=color)
        for i in range(4):
            wx = x0 + w * (0.08 + 0.23 * i)
            draw.rectangle([wx, y0 + h * 0.12, wx + w * 0.16, y0 + h * 0.4], fill=window)
        draw.rectangle([x0, y0 + h * 0.55, x0 + w, y0 + h * 0.62], fill=dark)

    y_wheel = y0 + h - 2 * wheel_r
    for cx in (x0 + int(w * 0.22), x0 + int(w * 0.78)):
        draw.ellipse([cx - wheel_r, y_wheel, cx + wheel_r, y_wheel + 2 * wheel_r], fill=(25, 25, 25))


def _background(rng: np.random.Generator, width: int, height: int) -> Image.Image:
    base = tuple(int(v) for v in rng.integers(90, 150, size=3))
    img = Image.new("RGB", (width, height), base)
    draw = ImageDraw.Draw(img)
    for _ in range(int(rng.integers(8, 16))):
        color = _jitter_color(rng, _CLUTTER_COLORS[int(rng.integers(len(_CLUTTER_COLORS)))], 25)
        x0, y0 = rng.integers(0, width), rng.integers(0, height)
        w, h = rng.integers(10, width // 2), rng.integers(10, height // 2)
        shape = rng.integers(3)
        if shape == 0:
            draw.rectangle([x0, y0, x0 + w, y0 + h], fill=color)
        elif shape == 1:
            draw.ellipse([x0, y0, x0 + w, y0 + h], fill=color)
        else:
            draw.line([x0, y0, x0 + w, y0 + h], fill=color, width=int(rng.integers(2, 6)))
    arr = np.asarray(img, dtype=np.int16)
    arr = arr + rng.normal(0, 8, arr.shape)
    return Image.fromarray(np.clip(arr, 0, 255).astype(np.uint8))


def generate_image(
    rng: np.random.Generator, class_id: int, width: int = 200, height: int = 150
) -> tuple[Image.Image, BoundingBox]:
    """One scene with the class's vehicle pasted at a random pose."""
    color, style = ARCHETYPES[class_id]
    img = _background(rng, width, height)
    draw = ImageDraw.Draw(img)
    vw = int(width * rng.uniform(0.35, 0.65))
    vh = int(vw * rng.uniform(0.45, 0.6))
    vh = min(vh, height - 4)
    x0 = int(rng.integers(1, max(2, width - vw - 1)))
    y0 = int(rng.integers(1, max(2, height - vh - 1)))
    _draw_vehicle(draw, style, _jitter_color(rng, color), x0, y0, vw, vh)
    return img, BoundingBox(float(x0), float(y0), float(min(x0 + vw, width)), float(min(y0 + vh, height)))


def generate_corpus(
    out_dir: str | Path,
    per_class: int = 100,
    seed: int = 0,
    width: int = 200,
    height: int = 150,
) -> Path:
    """Write a PNG corpus + manifest.csv (with ground-truth boxes) and
    return the manifest path. Deterministic given the seed."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    records = []
    for class_id in range(len(ARCHETYPES)):
        class_dir = out_dir / f"class_{class_id}"
        class_dir.mkdir(exist_ok=True)
        for i in range(per_class):
            img, bbox = generate_image(rng, class_id, width, height)
            rel = f"class_{class_id}/img_{i:04d}.png"
            img.save(out_dir / rel)
            records.append(ImageRecord(rel, class_id, width, height, bbox=bbox, source="auto"))
    manifest = DatasetManifest(tuple(records), root=out_dir)
    return save_manifest(manifest, out_dir / "manifest.csv")
