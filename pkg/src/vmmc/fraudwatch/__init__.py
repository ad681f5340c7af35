"""License-plate fraud middleware: registry, verdicts, audit, HTTP API."""

from .core import (
    DEFAULT_CONFIDENCE_FLOOR,
    VERDICT_STATUSES,
    AuditLog,
    Observation,
    Registry,
    RegistryEntry,
    SidecarPlateReader,
    Verdict,
    evaluate,
    normalize_plate,
)
from .service import create_fraudwatch_app

__all__ = [
    "DEFAULT_CONFIDENCE_FLOOR",
    "VERDICT_STATUSES",
    "AuditLog",
    "Observation",
    "Registry",
    "RegistryEntry",
    "SidecarPlateReader",
    "Verdict",
    "evaluate",
    "normalize_plate",
    "create_fraudwatch_app",
]
