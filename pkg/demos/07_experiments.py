"""The three experiment pipelines side by side, at miniature scale.

I trains the classifier on full frames; II crops the detected car first
and feeds the same architecture; III fine-tunes the detector on the boxes
produced by the detect stage. Each run leaves a reproducible directory
with config, metrics, confusion/detections, and a checkpoint.
"""

import tempfile
from pathlib import Path

from vmmc.classifier import NetworkSpec
from vmmc.dataset import load_manifest
from vmmc.detector import DetectorSpec, ManifestCarDetector
from vmmc.pipeline import ExperimentSpec, run_experiment
from vmmc.synthetic import generate_corpus

workdir = Path(tempfile.mkdtemp(prefix="vmmc_demo_"))
manifest = load_manifest(generate_corpus(workdir, per_class=10, seed=3))
small_net = NetworkSpec(stem_filters=8, stages=((16, 8, 1), (32, 16, 1), (32, 16, 1), (64, 32, 0)))

report_i = run_experiment(
    ExperimentSpec(id="I", seed=0, epochs=3, batch_size=16, network=small_net),
    manifest, out_root=workdir / "runs",
)
print(f"experiment I:   {report_i.scores}")

detector = ManifestCarDetector(manifest, jitter=0.05)
report_ii = run_experiment(
    ExperimentSpec(id="II", seed=0, epochs=3, batch_size=16, network=small_net),
    manifest, out_root=workdir / "runs", detector=detector,
)
print(f"experiment II:  {report_ii.scores} (fallbacks: {report_ii.fallback_full_frame})")

report_iii = run_experiment(
    ExperimentSpec(id="III", seed=0, epochs=3, batch_size=8, detector_spec=DetectorSpec(backbone="tiny")),
    manifest, out_root=workdir / "runs",
)
print(f"experiment III: { {k: round(v, 3) for k, v in report_iii.scores.items()} }")

print(f"\nrun directories under {workdir / 'runs'}:")
for run_dir in sorted((workdir / "runs").iterdir()):
    print(f"  {run_dir.name}: {sorted(p.name for p in run_dir.iterdir())}")
