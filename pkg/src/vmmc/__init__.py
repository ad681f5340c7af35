"""Vehicle make-model classification toolkit.

Subpackages: dataset (schema, splits, transforms), annotation
(semi-automatic boxes + review), classifier (residual network), detector
(single-shot detection), pipeline (the three experiments), evaluation
(metrics + throughput), fraudwatch (plate/class middleware), synthetic
(desk-scale corpus).
"""

__version__ = "0.1.0"

from .boxes import BoundingBox, iou
from .labels import CLASS_LABELS, NUM_CLASSES, ClassLabel, label_by_id

__all__ = [
    "BoundingBox",
    "iou",
    "CLASS_LABELS",
    "NUM_CLASSES",
    "ClassLabel",
    "label_by_id",
    "__version__",
]
