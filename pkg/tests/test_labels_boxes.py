import numpy as np
import pytest
from hypothesis import given, strategies as st

from vmmc.boxes import BoundingBox, iou, iou_matrix
from vmmc.labels import CLASS_LABELS, NUM_CLASSES, label_by_id


def test_exactly_seven_labels_with_permuted_ids():
    assert NUM_CLASSES == 7
    assert sorted(l.id for l in CLASS_LABELS) == list(range(7))
    assert CLASS_LABELS[6].make == "Other"


def test_label_lookup():
    assert label_by_id(0).model == "Passat"
    assert label_by_id(3).display_name == "Volkswagen Polo"
    with pytest.raises(ValueError):
        label_by_id(7)


def test_degenerate_box_rejected():
    with pytest.raises(ValueError):
        BoundingBox(1, 0, 1, 5)
    with pytest.raises(ValueError):
        BoundingBox(0, 3, 5, 3)


def test_iou_identical_boxes():
    b = BoundingBox(2, 3, 10, 12)
    assert iou(b, b) == 1.0


def test_iou_disjoint_boxes():
    assert iou(BoundingBox(0, 0, 1, 1), BoundingBox(5, 5, 6, 6)) == 0.0


def test_iou_hand_computed_third():
    # areas 4 and 4, intersection (1..2)x(0..2) = 2, union 4 + 4 - 2 = 6
    a = BoundingBox(0, 0, 2, 2)
    b = BoundingBox(1, 0, 3, 2)
    assert iou(a, b) == pytest.approx(1 / 3, abs=1e-12)


def test_iou_mixed_conventions_rejected():
    with pytest.raises(ValueError):
        iou(BoundingBox(0, 0, 1, 1), BoundingBox(0, 0, 1, 1, normalized=True))


boxes_st = st.builds(
    lambda x0, y0, w, h: BoundingBox(x0, y0, x0 + w, y0 + h),
    st.floats(-50, 50), st.floats(-50, 50),
    st.floats(0.1, 60), st.floats(0.1, 60),
)


@given(boxes_st, boxes_st)
def test_iou_symmetric_and_bounded(a, b):
    ab, ba = iou(a, b), iou(b, a)
    assert ab == ba
    assert 0.0 <= ab <= 1.0


@given(boxes_st)
def test_iou_self_is_one(a):
    assert iou(a, a) == pytest.approx(1.0)


@given(st.lists(boxes_st, min_size=1, max_size=8), st.lists(boxes_st, min_size=1, max_size=8))
def test_iou_matrix_matches_scalar(list_a, list_b):
    a = np.array([b.as_tuple() for b in list_a])
    b = np.array([b.as_tuple() for b in list_b])
    mat = iou_matrix(a, b)
    for i, ba in enumerate(list_a):
        for j, bb in enumerate(list_b):
            assert mat[i, j] == pytest.approx(iou(ba, bb), abs=1e-12)


def test_box_conversions_round_trip():
    b = BoundingBox(10, 20, 110, 100)
    n = b.to_normalized(200, 200)
    assert n.normalized and n.as_tuple() == (0.05, 0.1, 0.55, 0.5)
    back = n.to_pixels(200, 200)
    assert back.as_tuple() == pytest.approx(b.as_tuple())
