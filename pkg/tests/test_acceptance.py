"""Acceptance suite: one criterion per test, one [PASS]/[FAIL] line each.

Run with ``pytest tests/test_acceptance.py -s`` to watch the lines as they
come. The two desk-scale experiment criteria train real networks on the
synthetic corpus and take tens of minutes on a 2-core CPU; everything else
finishes in seconds.
"""

import time

import numpy as np
import pytest
import torch

from vmmc.annotation import AnnotationConfig, AnnotationStore, auto_annotate
from vmmc.annotation.store import AnnotationRow, DetectionCandidate
from vmmc.boxes import BoundingBox
from vmmc.classifier import build_network
from vmmc.dataset import load_manifest
from vmmc.detector import Detection, ManifestCarDetector, generate_anchors, smooth_l1
from vmmc.detector.nms import nms_indices
from vmmc.evaluation import fps_benchmark, mean_average_precision
from vmmc.fraudwatch import Observation, Registry, evaluate
from vmmc.classifier.network import ClassScores
from vmmc.pipeline import ExperimentSpec, run_experiment
from vmmc.synthetic import generate_corpus

from test_detector_nms import brute_force_nms


def record(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    print(line)  # visible with -s
    ACCEPTANCE_LINES.append(line)  # echoed by conftest in the terminal summary
    assert ok, line


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="module")
def desk_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("desk_corpus")
    manifest_path = generate_corpus(root, per_class=100, seed=0)
    return load_manifest(manifest_path)


def test_anchor_count():
    t0 = time.perf_counter()
    anchors = generate_anchors()
    elapsed = time.perf_counter() - t0
    record(
        "anchor count",
        len(anchors) == 8732 and elapsed < 1.0,
        f"{len(anchors)} boxes in {elapsed:.3f}s (need exactly 8732 in < 1s)",
    )


def test_parameter_count():
    t0 = time.perf_counter()
    net = build_network(seed=0)
    count = net.trainable_parameter_count
    elapsed = time.perf_counter() - t0
    record(
        "parameter count",
        count == 1_132_775 and elapsed < 10.0,
        f"{count:,} trainable parameters in {elapsed:.2f}s (need exactly 1,132,775 in < 10s)",
    )


def test_nms_oracle_equivalence():
    rng = np.random.default_rng(8732)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(1000):
        n = int(rng.integers(1, 51))
        boxes = np.empty((n, 4))
        boxes[:, 0] = rng.uniform(0, 80, n)
        boxes[:, 1] = rng.uniform(0, 80, n)
        boxes[:, 2] = boxes[:, 0] + rng.uniform(1, 40, n)
        boxes[:, 3] = boxes[:, 1] + rng.uniform(1, 40, n)
        probs = rng.integers(1, 20, n) / 20.0  # quantized so ties occur
        classes = rng.integers(0, 3, n)
        threshold = float(rng.uniform(0.1, 0.9))
        if nms_indices(boxes, probs, classes, threshold) != brute_force_nms(boxes, probs, classes, threshold):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    record(
        "nms oracle equivalence",
        mismatches == 0 and elapsed < 30.0,
        f"1000 randomized sets, {mismatches} mismatches vs brute force in {elapsed:.1f}s (< 30s)",
    )


def test_map_oracle():
    # worked fixture: AP(class 0) = 5/6, AP(class 1) = 2/3 (see
    # test_evaluation._hand_fixture for the hand ranking)
    ground_truths = {
        "A": [(BoundingBox(0, 0, 10, 10), 0), (BoundingBox(20, 20, 30, 30), 1)],
        "B": [(BoundingBox(0, 0, 10, 10), 0)],
        "C": [(BoundingBox(5, 5, 15, 15), 1)],
    }
    detections = [
        ("A", Detection(0.9, 0, BoundingBox(0, 0, 10, 10))),
        ("C", Detection(0.8, 0, BoundingBox(0, 0, 10, 10))),
        ("B", Detection(0.7, 0, BoundingBox(1, 1, 11, 11))),
        ("A", Detection(0.95, 1, BoundingBox(0, 0, 5, 5))),
        ("A", Detection(0.6, 1, BoundingBox(20, 20, 30, 30))),
        ("C", Detection(0.5, 1, BoundingBox(5, 5, 15, 15))),
    ]
    t0 = time.perf_counter()
    result = mean_average_precision(detections, ground_truths, iou_threshold=0.5)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(result.per_class[0] - 5 / 6) < 1e-9
        and abs(result.per_class[1] - 2 / 3) < 1e-9
        and abs(result.mean - 3 / 4) < 1e-9
        and elapsed < 1.0
    )
    record(
        "map oracle",
        ok,
        f"AP0={result.per_class[0]:.12f} (5/6), AP1={result.per_class[1]:.12f} (2/3), "
        f"mAP={result.mean:.12f} (3/4) in {elapsed:.3f}s",
    )


def test_loss_gradients():
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        # smooth L1 head
        p = torch.tensor(rng.normal(scale=1.5, size=8), requires_grad=True)
        target = torch.tensor(rng.normal(scale=1.5, size=8))
        smooth_l1(p - target).sum().backward()
        eps = 1e-6
        for i in range(8):
            hi, lo = p.detach().clone(), p.detach().clone()
            hi[i] += eps
            lo[i] -= eps
            fd = (smooth_l1(hi - target).sum() - smooth_l1(lo - target).sum()).item() / (2 * eps)
            rel = abs(p.grad[i].item() - fd) / max(abs(fd), 1e-6)
            worst = max(worst, rel)
        # cross-entropy toy head
        x = torch.tensor(rng.normal(size=3))
        label = torch.tensor(int(rng.integers(3)))
        w = torch.tensor(rng.normal(size=3), requires_grad=True)
        torch.nn.functional.cross_entropy((w * x)[None], label[None]).backward()
        for i in range(3):
            hi, lo = w.detach().clone(), w.detach().clone()
            hi[i] += eps
            lo[i] -= eps
            fd = (
                torch.nn.functional.cross_entropy((hi * x)[None], label[None]).item()
                - torch.nn.functional.cross_entropy((lo * x)[None], label[None]).item()
            ) / (2 * eps)
            rel = abs(w.grad[i].item() - fd) / max(abs(fd), 1e-6)
            worst = max(worst, rel)
    elapsed = time.perf_counter() - t0
    record(
        "loss gradients",
        worst < 1e-4 and elapsed < 30.0,
        f"worst relative error vs central differences {worst:.2e} in {elapsed:.1f}s (< 1e-4, < 30s)",
    )


def test_algorithm1_partition_and_round_trip(tmp_path):
    from PIL import Image

    t0 = time.perf_counter()
    certain_size = 0.15
    rng = np.random.default_rng(4)
    paths, fractions = [], {}
    for i in range(24):
        p = tmp_path / f"im{i:02d}.png"
        Image.new("RGB", (120, 90), (100, 100, 100)).save(p)
        paths.append(p)
        fractions[p.stem] = float(rng.uniform(0.02, 0.6))

    def stub(image, path=None):
        frac = fractions[path.stem]
        side_w, side_h = 120 * np.sqrt(frac), 90 * np.sqrt(frac)
        return [DetectionCandidate(BoundingBox(0, 0, side_w, side_h), 0.9)]

    store = AnnotationStore()
    rows, queue = auto_annotate(paths, stub, AnnotationConfig(certain_size=certain_size), store=store)
    expected_auto = {p.stem for p in paths if fractions[p.stem] >= certain_size}
    got_auto = {r.image_path.rsplit("/", 1)[-1].split(".")[0] for r in rows}
    got_queue = {q.image_path.rsplit("/", 1)[-1].split(".")[0] for q in queue}
    partition_ok = (
        got_auto == expected_auto
        and got_queue == {p.stem for p in paths} - expected_auto
        and len(rows) + len(queue) == 24
    )

    out1 = store.export_csv(tmp_path / "a.csv")
    manifest = load_manifest(out1)
    store2 = AnnotationStore()
    for r in manifest:
        store2.add_auto_row(AnnotationRow(r.image_path, r.class_id, r.bbox, r.source))
    out2 = store2.export_csv(tmp_path / "b.csv")
    round_trip_ok = out1.read_bytes() == out2.read_bytes()
    elapsed = time.perf_counter() - t0
    record(
        "algorithm 1 behavior",
        partition_ok and round_trip_ok and elapsed < 5.0,
        f"{len(rows)} auto / {len(queue)} review of 24, partition exact={partition_ok}, "
        f"csv round-trip byte-identical={round_trip_ok}, {elapsed:.1f}s (< 5s)",
    )


def test_fraud_truth_table():
    t0 = time.perf_counter()
    registry = Registry()
    registry.register("16ABC123", 2)
    floor = 0.8

    def scores(top_class, top_prob):
        rest = (1.0 - top_prob) / 6
        return ClassScores(tuple((i, top_prob if i == top_class else rest) for i in range(7)))

    cases = [
        (True, True, True, "authorized"),
        (True, True, False, "low_confidence"),
        (True, False, True, "fraud"),
        (True, False, False, "low_confidence"),
        (False, True, True, "unregistered"),
        (False, True, False, "low_confidence"),
        (False, False, True, "unregistered"),
        (False, False, False, "low_confidence"),
    ]
    failures = []
    for known, match, confident, expected in cases:
        plate = "16ABC123" if known else "55XYZ555"
        verdict = evaluate(
            Observation(plate, scores(2 if match else 4, 0.95 if confident else 0.55)), registry, floor
        )
        if verdict.status != expected:
            failures.append((known, match, confident, verdict.status, expected))
    elapsed = time.perf_counter() - t0
    record(
        "fraud truth table",
        not failures and elapsed < 1.0,
        f"8/8 combinations correct (incl. plate-match/model-mismatch fraud) in {elapsed:.3f}s"
        if not failures
        else f"wrong: {failures}",
    )


def test_fps_harness():
    def sleepy(frame):
        time.sleep(0.1)

    t0 = time.perf_counter()
    frames = (np.zeros((8, 8, 3)) for _ in range(100))
    report = fps_benchmark(sleepy, frames, duration_s=2.0, warmup=3)
    elapsed = time.perf_counter() - t0
    ok = abs(report.fps - 10.0) <= 1.0 and elapsed < 30.0
    record(
        "fps harness",
        ok,
        f"stub with 100ms latency measured at {report.fps:.2f} FPS over {report.frames_measured} frames "
        f"({report.hardware}) in {elapsed:.1f}s (need 10 +/- 1)",
    )


def test_desk_scale_experiment_i_learning(desk_corpus, tmp_path):
    t0 = time.perf_counter()
    spec = ExperimentSpec(id="I", seed=0, epochs=10, batch_size=32)
    report = run_experiment(spec, desk_corpus, out_root=tmp_path / "runs")
    elapsed = time.perf_counter() - t0
    test_acc = report.scores["test"]
    record(
        "desk-scale learning (experiment I)",
        test_acc >= 0.90 and elapsed < 15 * 60,
        f"test accuracy {test_acc:.3f} within 10 epochs in {elapsed / 60:.1f} min (need >= 0.90 in <= 15 min)",
    )


def test_desk_scale_experiment_ii_vs_i(desk_corpus, tmp_path):
    t0 = time.perf_counter()
    outcomes = []
    for seed in (0, 1, 2):
        spec_i = ExperimentSpec(id="I", seed=seed, epochs=6, batch_size=32)
        report_i = run_experiment(spec_i, desk_corpus, out_root=tmp_path / "runs")
        detector = ManifestCarDetector(desk_corpus, jitter=0.05, seed=seed)
        spec_ii = ExperimentSpec(id="II", seed=seed, epochs=6, batch_size=32)
        report_ii = run_experiment(spec_ii, desk_corpus, out_root=tmp_path / "runs", detector=detector)
        outcomes.append((seed, report_i.scores["test"], report_ii.scores["test"]))
    elapsed = time.perf_counter() - t0
    ok = all(acc_ii >= acc_i - 0.01 for _, acc_i, acc_ii in outcomes) and elapsed < 30 * 60
    detail = ", ".join(f"seed {s}: I={a:.3f} II={b:.3f}" for s, a, b in outcomes)
    record(
        "desk-scale experiment II vs I",
        ok,
        f"{detail} in {elapsed / 60:.1f} min (need II >= I - 0.01 per seed in <= 30 min)",
    )
