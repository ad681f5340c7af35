"""Semi-automatic annotation: detector-proposed boxes plus human review."""

from .campaign import (
    AnnotationConfig,
    CarDetector,
    DetectorError,
    auto_annotate,
    run_campaign,
)
from .service import create_review_app
from .store import (
    AnnotationRow,
    AnnotationStore,
    Decision,
    DecisionError,
    Delete,
    DetectionCandidate,
    Label,
    ReviewItem,
)

__all__ = [
    "AnnotationConfig",
    "CarDetector",
    "DetectorError",
    "auto_annotate",
    "run_campaign",
    "create_review_app",
    "AnnotationRow",
    "AnnotationStore",
    "Decision",
    "DecisionError",
    "Delete",
    "DetectionCandidate",
    "Label",
    "ReviewItem",
]
