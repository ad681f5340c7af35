import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from PIL import Image

from vmmc.annotation import (
    AnnotationConfig,
    AnnotationRow,
    AnnotationStore,
    DecisionError,
    Delete,
    DetectionCandidate,
    DetectorError,
    Label,
    ReviewItem,
    auto_annotate,
    run_campaign,
)
from vmmc.boxes import BoundingBox
from vmmc.dataset import load_manifest


def make_images(tmp_path, names, size=(100, 80)):
    paths = []
    for name in names:
        p = tmp_path / name
        p.parent.mkdir(parents=True, exist_ok=True)
        Image.new("RGB", size, (90, 90, 90)).save(p)
        paths.append(p)
    return paths


class StubDetector:
    """Returns canned candidates per image filename stem."""

    def __init__(self, by_stem):
        self.by_stem = by_stem

    def __call__(self, image, path=None):
        return self.by_stem.get(path.stem, [])


def box_of_area_fraction(frac, w=100, h=80):
    side_w = w * np.sqrt(frac)
    side_h = h * np.sqrt(frac)
    return BoundingBox(0, 0, side_w, side_h)


def test_large_car_auto_annotated(tmp_path):
    paths = make_images(tmp_path, ["a.png"])
    detector = StubDetector({"a": [DetectionCandidate(box_of_area_fraction(0.5), 0.9)]})
    rows, queue = auto_annotate(paths, detector, AnnotationConfig(certain_size=0.1, class_id=4))
    assert len(rows) == 1 and not queue
    assert rows[0].class_id == 4 and rows[0].source == "auto"


def test_no_cars_goes_to_review(tmp_path):
    paths = make_images(tmp_path, ["a.png"])
    rows, queue = auto_annotate(paths, StubDetector({}), AnnotationConfig())
    assert not rows and len(queue) == 1
    assert queue[0].status == "pending" and queue[0].best_candidate is None


def test_largest_candidate_wins(tmp_path):
    paths = make_images(tmp_path, ["a.png"])
    small = DetectionCandidate(box_of_area_fraction(0.04), 0.95)
    large = DetectionCandidate(box_of_area_fraction(0.2), 0.8)
    detector = StubDetector({"a": [small, large]})
    rows, queue = auto_annotate(paths, detector, AnnotationConfig(certain_size=0.1, class_id=0))
    assert len(rows) == 1 and not queue
    assert rows[0].bbox.as_tuple() == large.bbox.as_tuple()


def test_low_confidence_candidates_ignored(tmp_path):
    paths = make_images(tmp_path, ["a.png"])
    detector = StubDetector({"a": [DetectionCandidate(box_of_area_fraction(0.5), 0.3)]})
    rows, queue = auto_annotate(paths, detector, AnnotationConfig(detector_confidence_threshold=0.5))
    assert not rows and len(queue) == 1


def test_unreadable_image_becomes_review_item(tmp_path):
    bad = tmp_path / "broken.png"
    bad.write_bytes(b"not an image")
    rows, queue = auto_annotate([bad], StubDetector({}), AnnotationConfig())
    assert not rows and len(queue) == 1 and queue[0].best_candidate is None


def test_detector_failure_flushes_partial(tmp_path):
    paths = make_images(tmp_path, ["a.png", "b.png"])

    def detector(image, path=None):
        if path.stem == "b":
            raise RuntimeError("detector crashed")
        return [DetectionCandidate(box_of_area_fraction(0.5), 0.9)]

    store = AnnotationStore(tmp_path / "store")
    with pytest.raises(DetectorError) as err:
        auto_annotate(paths, detector, AnnotationConfig(), store=store)
    assert len(err.value.rows) == 1
    assert (tmp_path / "store" / "rows.csv").exists()
    reloaded = AnnotationStore(tmp_path / "store")
    assert len(reloaded.rows) == 1


def test_partition_is_exact_at_threshold(tmp_path):
    # area exactly equal to certain_size counts as auto (>= comparison)
    paths = make_images(tmp_path, ["lo.png", "eq.png", "hi.png"])
    cfg = AnnotationConfig(certain_size=0.25)
    detector = StubDetector(
        {
            "lo": [DetectionCandidate(box_of_area_fraction(0.2499), 0.9)],
            "eq": [DetectionCandidate(BoundingBox(0, 0, 50, 40), 0.9)],  # 2000/8000 = 0.25
            "hi": [DetectionCandidate(box_of_area_fraction(0.3), 0.9)],
        }
    )
    rows, queue = auto_annotate(paths, detector, cfg)
    assert {r.image_path.split("/")[-1] for r in rows} == {"eq.png", "hi.png"}
    assert [q.image_path.split("/")[-1] for q in queue] == ["lo.png"]


def test_monotone_threshold_property(tmp_path):
    paths = make_images(tmp_path, [f"im{i}.png" for i in range(10)])
    rng = np.random.default_rng(0)
    detector = StubDetector(
        {f"im{i}": [DetectionCandidate(box_of_area_fraction(rng.uniform(0.02, 0.9)), 0.9)] for i in range(10)}
    )
    auto_sets = []
    for certain in (0.05, 0.2, 0.5, 0.8):
        rows, _ = auto_annotate(paths, detector, AnnotationConfig(certain_size=certain))
        auto_sets.append({r.image_path for r in rows})
    for bigger, smaller in zip(auto_sets, auto_sets[1:]):
        assert smaller <= bigger  # raising certain_size never adds auto rows


def test_conservation_every_image_lands_once(tmp_path):
    paths = make_images(tmp_path, [f"im{i}.png" for i in range(8)])
    rng = np.random.default_rng(3)
    detector = StubDetector(
        {f"im{i}": [DetectionCandidate(box_of_area_fraction(rng.uniform(0.02, 0.6)), 0.9)] for i in range(8)}
    )
    store = AnnotationStore()
    rows, queue = auto_annotate(paths, detector, AnnotationConfig(certain_size=0.15), store=store)
    assert len(rows) + len(queue) == 8
    auto_paths = {r.image_path for r in rows}
    queue_paths = {q.image_path for q in queue}
    assert not (auto_paths & queue_paths)
    # resolve the queue: half labeled, half deleted -> still one fate each
    for i, item in enumerate(queue):
        decision = Label(2, BoundingBox(1, 1, 30, 30)) if i % 2 == 0 else Delete()
        store.apply_decision(item, decision)
    stats = store.stats()
    assert stats["pending"] == 0
    assert stats["auto_rows"] + stats["human_rows"] + stats["deleted"] == 8


def test_apply_decision_label():
    store = AnnotationStore()
    item = store.enqueue(ReviewItem(image_path="x.png"))
    done = store.apply_decision(item, Label(3, BoundingBox(0, 0, 10, 10)))
    assert done.status == "labeled" and done.assigned_class == 3
    assert [r.class_id for r in store.rows] == [3]
    assert store.rows[0].source == "human"


def test_apply_decision_delete():
    store = AnnotationStore()
    item = store.enqueue(ReviewItem(image_path="x.png"))
    done = store.apply_decision(item, Delete())
    assert done.status == "deleted"
    assert store.rows == []


def test_second_decision_rejected():
    store = AnnotationStore()
    item = store.enqueue(ReviewItem(image_path="x.png"))
    store.apply_decision(item, Label(1, BoundingBox(0, 0, 5, 5)))
    before = store.rows
    for decision in (Label(2, BoundingBox(0, 0, 5, 5)), Delete()):
        with pytest.raises(DecisionError):
            store.apply_decision(item, decision)
    assert store.rows == before


def test_decision_state_machine_exhaustive():
    # from pending, each decision is allowed exactly once; from any settled
    # state, every decision errors and the store is untouched
    for first in ("label", "delete"):
        for second in ("label", "delete"):
            store = AnnotationStore()
            item = store.enqueue(ReviewItem(image_path="x.png"))
            apply = lambda kind: store.apply_decision(
                item, Label(0, BoundingBox(0, 0, 2, 2)) if kind == "label" else Delete()
            )
            apply(first)
            snapshot = [(r.image_path, r.class_id) for r in store.rows]
            with pytest.raises(DecisionError):
                apply(second)
            assert [(r.image_path, r.class_id) for r in store.rows] == snapshot


def test_reopen_allows_human_correction(tmp_path):
    paths = make_images(tmp_path, ["a.png"])
    detector = StubDetector({"a": [DetectionCandidate(box_of_area_fraction(0.5), 0.9)]})
    store = AnnotationStore()
    auto_annotate(paths, detector, AnnotationConfig(class_id=0), store=store)
    item = store.reopen(store.rows[0].image_path)
    store.apply_decision(item, Label(5, BoundingBox(2, 2, 40, 40)))
    assert [r.class_id for r in store.rows] == [5]
    assert store.rows[0].source == "human"


def test_run_campaign_assigns_ids_in_folder_order(tmp_path):
    for c in range(2):
        make_images(tmp_path, [f"cls{c}/im{i}.png" for i in range(3)])
    detector = StubDetector(
        {f"im{i}": [DetectionCandidate(box_of_area_fraction(0.5), 0.9)] for i in range(3)}
    )
    store = run_campaign([tmp_path / "cls0", tmp_path / "cls1"], detector, AnnotationConfig())
    assert len(store.rows) == 6
    assert {r.class_id for r in store.rows} == {0, 1}


def test_run_campaign_all_below_threshold(tmp_path):
    make_images(tmp_path, [f"cls0/im{i}.png" for i in range(3)])
    store = run_campaign([tmp_path / "cls0"], StubDetector({}), AnnotationConfig())
    assert len(store.rows) == 0
    assert store.stats()["pending"] == 3


def test_run_campaign_seven_folders(tmp_path):
    folders = []
    for c in range(7):
        make_images(tmp_path, [f"f{c}/im.png"])
        folders.append(tmp_path / f"f{c}")
    detector = StubDetector({"im": [DetectionCandidate(box_of_area_fraction(0.5), 0.9)]})
    store = run_campaign(folders, detector, AnnotationConfig())
    got = sorted(r.class_id for r in store.rows)
    assert got == list(range(7))


def test_run_campaign_rejects_overlapping_paths(tmp_path):
    make_images(tmp_path, ["shared/im.png"])
    with pytest.raises(ValueError, match="more than one class folder"):
        run_campaign([tmp_path / "shared", tmp_path / "shared"], StubDetector({}), AnnotationConfig())


def test_export_empty_store(tmp_path):
    store = AnnotationStore()
    out = store.export_csv(tmp_path / "empty.csv")
    assert out.read_text() == "image_path,class_id,xmin,ymin,xmax,ymax,source\n"


def test_export_single_row_two_lines(tmp_path):
    store = AnnotationStore()
    store.add_auto_row(AnnotationRow("a.png", 0, BoundingBox(0, 0, 10, 10), "auto"))
    out = store.export_csv(tmp_path / "one.csv")
    assert len(out.read_text().splitlines()) == 2


finite_coord = st.floats(0, 500, allow_nan=False, allow_infinity=False).map(lambda v: round(v, 3))


@settings(max_examples=30, deadline=None)
@given(
    rows=st.lists(
        st.tuples(st.integers(0, 6), finite_coord, finite_coord, st.floats(0.5, 300), st.floats(0.5, 300)),
        min_size=1,
        max_size=100,
        unique_by=lambda t: t,
    )
)
def test_export_round_trip_property(tmp_path_factory, rows):
    tmp_path = tmp_path_factory.mktemp("rt")
    store = AnnotationStore()
    for i, (class_id, x0, y0, w, h) in enumerate(rows):
        store.add_auto_row(
            AnnotationRow(f"im{i}.png", class_id, BoundingBox(x0, y0, x0 + w, y0 + h), "auto")
        )
    out1 = store.export_csv(tmp_path / "a.csv")
    manifest = load_manifest(out1)
    assert [(r.image_path, r.class_id, r.bbox.as_tuple(), r.source) for r in manifest] == [
        (r.image_path, r.class_id, r.bbox.as_tuple(), r.source) for r in store.rows
    ]
    store2 = AnnotationStore()
    for r in manifest:
        store2.add_auto_row(AnnotationRow(r.image_path, r.class_id, r.bbox, r.source))
    out2 = store2.export_csv(tmp_path / "b.csv")
    assert out1.read_bytes() == out2.read_bytes()


def test_store_persistence_round_trip(tmp_path):
    store = AnnotationStore(tmp_path / "campaign")
    store.add_auto_row(AnnotationRow("a.png", 1, BoundingBox(0, 0, 10, 10), "auto"))
    store.enqueue(ReviewItem(image_path="b.png", best_candidate=DetectionCandidate(BoundingBox(1, 1, 4, 4), 0.4)))
    resumed = AnnotationStore(tmp_path / "campaign")
    assert len(resumed.rows) == 1
    assert resumed.stats()["pending"] == 1
    item = resumed.items[0]
    assert item.best_candidate.confidence == 0.4


def test_determinism_same_inputs_same_store(tmp_path):
    paths = make_images(tmp_path, [f"im{i}.png" for i in range(6)])
    rng = np.random.default_rng(5)
    stems = {f"im{i}": [DetectionCandidate(box_of_area_fraction(rng.uniform(0.05, 0.5)), 0.9)] for i in range(6)}
    runs = []
    for _ in range(2):
        rows, queue = auto_annotate(paths, StubDetector(stems), AnnotationConfig(certain_size=0.2))
        runs.append(
            (
                [(r.image_path, r.class_id, r.bbox.as_tuple()) for r in rows],
                [q.image_path for q in queue],
            )
        )
    assert runs[0] == runs[1]
