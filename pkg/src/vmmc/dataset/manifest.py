"""Corpus manifest: one labeled image per row, optional ground-truth box.

On-disk format is UTF-8 CSV with LF line endings and the fixed header

    image_path,class_id,xmin,ymin,xmax,ymax,source

Bbox cells may be empty (classification-only rows). Paths are relative to
the manifest's own directory. The same schema doubles as the annotation
CSV; the ``source`` column records whether the box came from the detector
(``auto``) or a human decision (``human``).
"""

from __future__ import annotations

import csv
import io
import math
import os
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

from PIL import Image

from ..boxes import BoundingBox
from ..labels import is_valid_class_id

MANIFEST_HEADER = ["image_path", "class_id", "xmin", "ymin", "xmax", "ymax", "source"]
SOURCES = ("auto", "human")


class ManifestError(ValueError):
    """Raised for unreadable or inconsistent manifest files."""


@dataclass(frozen=True)
class ImageRecord:
    image_path: str
    class_id: int
    width: int
    height: int
    bbox: BoundingBox | None = None
    source: str = "auto"

    def __post_init__(self):
        if not is_valid_class_id(self.class_id):
            raise ValueError(f"unknown class_id {self.class_id}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"non-positive image dims {self.width}x{self.height}")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")
        if self.bbox is not None:
            b = self.bbox
            if b.normalized:
                raise ValueError("manifest bboxes are pixel-space")
            if not (0 <= b.x_min and b.x_max <= self.width and 0 <= b.y_min and b.y_max <= self.height):
                raise ValueError(
                    f"bbox {b.as_tuple()} outside image bounds {self.width}x{self.height} "
                    f"for {self.image_path}"
                )


@dataclass(frozen=True)
class DatasetManifest:
    records: tuple[ImageRecord, ...]
    root: Path = field(default_factory=Path)

    def __post_init__(self):
        seen = set()
        for r in self.records:
            if r.image_path in seen:
                raise ManifestError(f"duplicate image_path {r.image_path!r}")
            seen.add(r.image_path)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def class_counts(self) -> dict[int, int]:
        # Always recomputed from the records, never trusted from a file.
        return dict(Counter(r.class_id for r in self.records))

    def resolve(self, record: ImageRecord) -> Path:
        return self.root / record.image_path

    def filter(self, predicate) -> "DatasetManifest":
        return DatasetManifest(tuple(r for r in self.records if predicate(r)), root=self.root)


def _parse_bbox(cells: list[str], line_no: int) -> BoundingBox | None:
    filled = [c for c in cells if c.strip() != ""]
    if not filled:
        return None
    if len(filled) != 4:
        raise ManifestError(f"line {line_no}: bbox must have 0 or 4 coordinates, got {len(filled)}")
    try:
        x0, y0, x1, y1 = (float(c) for c in cells)
    except ValueError as exc:
        raise ManifestError(f"line {line_no}: non-numeric bbox cell ({exc})") from None
    if not all(math.isfinite(v) for v in (x0, y0, x1, y1)):
        raise ManifestError(f"line {line_no}: non-finite bbox coordinate")
    try:
        return BoundingBox(x0, y0, x1, y1)
    except ValueError as exc:
        raise ManifestError(f"line {line_no}: {exc}") from None


def _probe_dims(path: Path, bbox: BoundingBox | None) -> tuple[int, int]:
    """Image dims from the file header when present, else the smallest dims
    consistent with the bbox. The CSV schema carries no size columns, and
    count-only fixture manifests legitimately reference absent files."""
    if path.is_file():
        with Image.open(path) as im:
            return im.size  # (width, height)
    if bbox is not None:
        return max(1, math.ceil(bbox.x_max)), max(1, math.ceil(bbox.y_max))
    return 1, 1


def load_manifest(path: str | os.PathLike) -> DatasetManifest:
    """Read and validate a manifest CSV.

    Raises ManifestError for a missing file, malformed row, unknown
    class_id, or duplicate image_path. Class counts are recomputed.
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    root = path.parent
    records: list[ImageRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return DatasetManifest((), root=root)  # empty body: zero records
        if header != MANIFEST_HEADER:
            raise ManifestError(f"bad header {header!r}, expected {MANIFEST_HEADER!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(MANIFEST_HEADER):
                raise ManifestError(f"line {line_no}: expected {len(MANIFEST_HEADER)} cells, got {len(row)}")
            image_path, class_id_cell, *bbox_cells, source = row
            if not image_path:
                raise ManifestError(f"line {line_no}: empty image_path")
            try:
                class_id = int(class_id_cell)
            except ValueError:
                raise ManifestError(f"line {line_no}: non-integer class_id {class_id_cell!r}") from None
            if not is_valid_class_id(class_id):
                raise ManifestError(f"line {line_no}: unknown class_id {class_id}")
            if source not in SOURCES:
                raise ManifestError(f"line {line_no}: unknown source {source!r}")
            bbox = _parse_bbox(bbox_cells, line_no)
            width, height = _probe_dims(root / image_path, bbox)
            try:
                records.append(ImageRecord(image_path, class_id, width, height, bbox=bbox, source=source))
            except ValueError as exc:
                raise ManifestError(f"line {line_no}: {exc}") from None
    try:
        return DatasetManifest(tuple(records), root=root)
    except ManifestError:
        raise
    except ValueError as exc:
        raise ManifestError(str(exc)) from None


def format_rows(records) -> str:
    """Canonical CSV text for records: fixed header, LF endings, repr floats.

    Float coordinates use Python repr (shortest round-trip form) so that
    export -> load -> export is byte-identical.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MANIFEST_HEADER)
    for r in records:
        if r.bbox is None:
            cells = ["", "", "", ""]
        else:
            cells = [repr(float(v)) for v in r.bbox.as_tuple()]
        writer.writerow([r.image_path, r.class_id, *cells, r.source])
    return buf.getvalue()


def save_manifest(manifest_or_records, path: str | os.PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(format_rows(manifest_or_records))
    return path


def ingest_directory(root: str | os.PathLike, class_dirs: dict[str, int] | None = None) -> DatasetManifest:
    """Build a manifest from a directory tree of images.

    With ``class_dirs`` mapping subdirectory name -> class id, labels come
    from the tree; otherwise every image gets class 6 ("other") and the
    caller is expected to annotate properly later.
    """
    root = Path(root)
    records = []
    exts = {".jpg", ".jpeg", ".png", ".bmp"}
    for p in sorted(root.rglob("*")):
        if p.suffix.lower() not in exts or not p.is_file():
            continue
        rel = p.relative_to(root)
        if class_dirs is not None:
            top = rel.parts[0]
            if top not in class_dirs:
                continue
            class_id = class_dirs[top]
        else:
            class_id = 6
        with Image.open(p) as im:
            width, height = im.size
        records.append(ImageRecord(str(rel), class_id, width, height, source="auto"))
    return DatasetManifest(tuple(records), root=root)


def with_bbox(manifest: DatasetManifest, only_with_bbox: bool = True) -> DatasetManifest:
    return manifest.filter(lambda r: (r.bbox is not None) == only_with_bbox)


def replace_root(manifest: DatasetManifest, root: Path) -> DatasetManifest:
    return replace(manifest, root=root)
