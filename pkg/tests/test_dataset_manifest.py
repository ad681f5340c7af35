import numpy as np
import pytest
from PIL import Image

from vmmc.boxes import BoundingBox
from vmmc.dataset import (
    DatasetManifest,
    ImageRecord,
    ManifestError,
    format_rows,
    load_manifest,
    save_manifest,
)

# Reference corpus distribution: six named classes plus the catch-all
CORPUS_COUNTS = [4024, 4293, 4234, 3208, 3783, 4183, 4162]
OTHER_BREAKDOWN = [663, 707, 468, 693, 608, 533, 490]


def _write_counts_manifest(path, counts_by_class):
    lines = ["image_path,class_id,xmin,ymin,xmax,ymax,source"]
    for class_id, count in counts_by_class:
        for i in range(count):
            lines.append(f"c{class_id}/im{i:05d}.jpg,{class_id},,,,,auto")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_full_corpus_counts(tmp_path):
    path = _write_counts_manifest(tmp_path / "m.csv", list(enumerate(CORPUS_COUNTS)))
    manifest = load_manifest(path)
    assert len(manifest) == 27887
    assert manifest.class_counts[0] == 4024
    assert manifest.class_counts == dict(enumerate(CORPUS_COUNTS))


def test_other_class_breakdown_sums_to_other_row():
    # 663+707+468+693+608+533+490 = 4162, the catch-all class total
    assert sum(OTHER_BREAKDOWN) == 4162 == CORPUS_COUNTS[6]


def test_other_class_manifest(tmp_path):
    path = _write_counts_manifest(tmp_path / "m.csv", [(6, sum(OTHER_BREAKDOWN))])
    manifest = load_manifest(path)
    assert manifest.class_counts == {6: 4162}


def test_empty_body_manifest(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("", encoding="utf-8")
    assert len(load_manifest(path)) == 0


def test_missing_file():
    with pytest.raises(ManifestError, match="not found"):
        load_manifest("/nonexistent/m.csv")


def test_malformed_row(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("image_path,class_id,xmin,ymin,xmax,ymax,source\na.jpg,0,1,2,3,auto\n")
    with pytest.raises(ManifestError, match="line 2"):
        load_manifest(path)


def test_unknown_class_id(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("image_path,class_id,xmin,ymin,xmax,ymax,source\na.jpg,9,,,,,auto\n")
    with pytest.raises(ManifestError, match="unknown class_id"):
        load_manifest(path)


def test_duplicate_image_path(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text(
        "image_path,class_id,xmin,ymin,xmax,ymax,source\na.jpg,0,,,,,auto\na.jpg,1,,,,,auto\n"
    )
    with pytest.raises(ManifestError, match="duplicate"):
        load_manifest(path)


def test_partial_bbox_rejected(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("image_path,class_id,xmin,ymin,xmax,ymax,source\na.jpg,0,1,2,,,auto\n")
    with pytest.raises(ManifestError, match="0 or 4"):
        load_manifest(path)


def test_bbox_within_bounds_enforced():
    with pytest.raises(ValueError, match="outside image bounds"):
        ImageRecord("a.jpg", 0, width=100, height=100, bbox=BoundingBox(0, 0, 120, 50))


def test_dims_probed_from_real_image(tmp_path):
    Image.new("RGB", (37, 21)).save(tmp_path / "img.png")
    (tmp_path / "m.csv").write_text(
        "image_path,class_id,xmin,ymin,xmax,ymax,source\nimg.png,2,1.0,2.0,30.0,20.0,human\n"
    )
    manifest = load_manifest(tmp_path / "m.csv")
    rec = manifest.records[0]
    assert (rec.width, rec.height) == (37, 21)
    assert rec.source == "human"
    assert rec.bbox.as_tuple() == (1.0, 2.0, 30.0, 20.0)


def test_round_trip_is_byte_identical(tmp_path, small_corpus):
    out1 = save_manifest(small_corpus, tmp_path / "a.csv")
    again = load_manifest(out1)
    out2 = save_manifest(again, tmp_path / "b.csv")
    assert out1.read_bytes() == out2.read_bytes()
    assert [r.image_path for r in again] == [r.image_path for r in small_corpus]
    assert [r.bbox.as_tuple() for r in again] == [r.bbox.as_tuple() for r in small_corpus]


def test_format_rows_uses_lf_only(small_corpus):
    text = format_rows(small_corpus.records[:3])
    assert "\r" not in text
    assert text.startswith("image_path,class_id,xmin,ymin,xmax,ymax,source\n")
