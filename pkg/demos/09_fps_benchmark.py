"""Detector throughput measurement.

Wall-clock frames per second with warmup frames excluded and the hardware
recorded next to the number, since FPS claims travel poorly between GPUs.
This demo times the light test backbone on this machine's CPU.
"""

import numpy as np

from vmmc.dataset import preprocess
from vmmc.detector import DetectorSpec, build_detector, detect
from vmmc.evaluation import fps_benchmark

network = build_detector(DetectorSpec(num_classes=7, backbone="tiny"), seed=0)
rng = np.random.default_rng(0)
frames = (rng.random((300, 300, 3), dtype=np.float32) for _ in range(10_000))

report = fps_benchmark(lambda f: detect(network, f, conf_floor=0.5), frames, duration_s=5.0, warmup=3)
print(f"tiny backbone: {report.fps:.1f} FPS over {report.frames_measured} frames")
print(f"hardware: {report.hardware}")

def sleepy(frame):
    import time
    time.sleep(0.1)

frames = (np.zeros((4, 4, 3)) for _ in range(1000))
report = fps_benchmark(sleepy, frames, duration_s=2.0, warmup=3)
print(f"\n100 ms stub measures {report.fps:.1f} FPS (validates the harness itself)")
