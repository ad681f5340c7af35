"""Experiment orchestration and shared crop logic."""

from .crops import crop_largest_car
from .experiments import ExperimentError, ExperimentReport, ExperimentSpec, run_experiment

__all__ = [
    "crop_largest_car",
    "ExperimentError",
    "ExperimentReport",
    "ExperimentSpec",
    "run_experiment",
]
