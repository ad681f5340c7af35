"""The seven-way vehicle make-model label space.

Six named make-model classes plus a catch-all "other" class. The ids are
frozen: confusion matrices, checkpoints, and annotation CSVs all index by
them, so reordering would silently corrupt downstream artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ClassLabel:
    id: int
    make: str
    model: str

    @property
    def display_name(self) -> str:
        return f"{self.make} {self.model}".strip()


CLASS_LABELS: tuple[ClassLabel, ...] = (
    ClassLabel(0, "Volkswagen", "Passat"),
    ClassLabel(1, "Renault", "Fluence"),
    ClassLabel(2, "Fiat", "Linea"),
    ClassLabel(3, "Volkswagen", "Polo"),
    ClassLabel(4, "Renault", "Toros"),
    ClassLabel(5, "Fiat", "Dogan"),
    ClassLabel(6, "Other", ""),
)

NUM_CLASSES = len(CLASS_LABELS)

_BY_ID = {label.id: label for label in CLASS_LABELS}


def label_by_id(class_id: int) -> ClassLabel:
    try:
        return _BY_ID[class_id]
    except KeyError:
        raise ValueError(f"unknown class_id {class_id!r}; valid ids are 0..{NUM_CLASSES - 1}") from None


def is_valid_class_id(class_id: int) -> bool:
    return class_id in _BY_ID
