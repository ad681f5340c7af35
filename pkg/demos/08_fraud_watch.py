"""The plate-fraud middleware end to end.

A registry binds plates to make-model classes. Each observation pairs a
plate string (external reader; stubbed by a sidecar file here) with the
classifier's prediction. Matching plates with mismatched models raise a
fraud verdict; low-confidence predictions go to review instead.
"""

import tempfile
from pathlib import Path

from vmmc.classifier.network import ClassScores
from vmmc.fraudwatch import (
    AuditLog,
    Observation,
    Registry,
    SidecarPlateReader,
    evaluate,
)
from vmmc.labels import label_by_id

workdir = Path(tempfile.mkdtemp(prefix="vmmc_demo_"))

registry = Registry(workdir / "registry.csv")
registry.register("16 ABC 123", 2)   # a Fiat Linea
registry.register("34 KLM 90", 0)    # a Volkswagen Passat
print(f"registry holds {len(registry)} plates (persisted to {workdir / 'registry.csv'})")


def scores(top_class, top_prob):
    rest = (1 - top_prob) / 6
    return ClassScores(tuple((i, top_prob if i == top_class else rest) for i in range(7)))


audit = AuditLog(workdir / "verdicts.jsonl")

frame = workdir / "cam0.png"
frame.write_bytes(b"")  # stand-in for a camera frame
(workdir / "cam0.png.plate.txt").write_text("16ABC123")
reader = SidecarPlateReader()
plate = reader(frame)

observations = [
    Observation(plate, scores(2, 0.97), camera_id="gate-1"),   # matches registration
    Observation(plate, scores(5, 0.96), camera_id="gate-1"),   # same plate, wrong model
    Observation("06XYZ42", scores(1, 0.93), camera_id="gate-2"),
    Observation(plate, scores(5, 0.55), camera_id="gate-1"),   # too uncertain to accuse
]
for obs in observations:
    verdict = evaluate(obs, registry)
    audit.append(verdict)
    predicted = label_by_id(verdict.top_class).display_name
    print(f"  plate {obs.plate:<10} predicted {predicted:<20} p={verdict.top_prob:.2f} -> {verdict.status}")

frauds = [v for v in audit.read_all() if v["status"] == "fraud"]
print(f"\naudit log: {len(audit.read_all())} verdicts, {len(frauds)} fraud")
