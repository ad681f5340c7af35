"""Deterministic stratified train/val/test splitting.

Sizing: each class first gets floor(fraction * class_count) records for
train and val; classes are then promoted one record at a time, largest
fractional remainder first, until the global totals reach
floor(fraction * N). Test takes the remainder. This keeps per-class error
within one record of exact stratification while the global sizes match the
plain floor rule on N (e.g. 27887 at 0.8/0.1/0.1 -> 22309/2788/2790).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .manifest import DatasetManifest, ImageRecord


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)

    def __post_init__(self):
        if any(f < 0 for f in self.fractions):
            raise ValueError("fractions must be non-negative")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ValueError(f"fractions must sum to 1, got {sum(self.fractions)}")


def _allocate(class_counts: dict[int, int], fractions, n_total: int) -> dict[int, tuple[int, int, int]]:
    """Per-class (train, val, test) sizes under the promoted floor rule."""
    f_train, f_val, _ = fractions
    targets = [int(np.floor(f_train * n_total)), int(np.floor(f_val * n_total))]
    class_ids = sorted(class_counts)
    alloc = {c: [0, 0, 0] for c in class_ids}
    remaining = dict(class_counts)
    for split_idx, (frac, target) in enumerate(zip((f_train, f_val), targets)):
        quotas = {c: frac * class_counts[c] for c in class_ids}
        for c in class_ids:
            take = min(int(np.floor(quotas[c])), remaining[c])
            alloc[c][split_idx] = take
            remaining[c] -= take
        deficit = target - sum(alloc[c][split_idx] for c in class_ids)
        # promote by largest fractional remainder; ties by class id; loop in
        # case one pass cannot cover the deficit
        order = sorted(class_ids, key=lambda c: (-(quotas[c] - np.floor(quotas[c])), c))
        while deficit > 0:
            progressed = False
            for c in order:
                if deficit <= 0:
                    break
                if remaining[c] > 0:
                    alloc[c][split_idx] += 1
                    remaining[c] -= 1
                    deficit -= 1
                    progressed = True
            if not progressed:
                break
    for c in class_ids:
        alloc[c][2] = remaining[c]
    return {c: tuple(v) for c, v in alloc.items()}


def split_dataset(
    manifest: DatasetManifest, spec: SplitSpec
) -> tuple[DatasetManifest, DatasetManifest, DatasetManifest]:
    """Partition a manifest into stratified train/val/test manifests.

    Deterministic given spec.seed; the union of the outputs equals the
    input and the parts are pairwise disjoint. Raises SplitError when a
    class has fewer records than the number of non-zero splits.
    """
    if len(manifest) == 0:
        raise SplitError("cannot split an empty manifest")
    n_nonzero = sum(1 for f in spec.fractions if f > 0)
    counts = manifest.class_counts
    for c, n in sorted(counts.items()):
        if n < n_nonzero:
            raise SplitError(f"class {c} has {n} records but {n_nonzero} non-zero splits")

    alloc = _allocate(counts, spec.fractions, len(manifest))
    by_class: dict[int, list[ImageRecord]] = {c: [] for c in counts}
    for r in manifest:
        by_class[r.class_id].append(r)

    rng = np.random.default_rng(spec.seed)
    parts: tuple[list[ImageRecord], ...] = ([], [], [])
    for c in sorted(by_class):
        recs = by_class[c]
        order = rng.permutation(len(recs))
        shuffled = [recs[i] for i in order]
        n_train, n_val, _ = alloc[c]
        parts[0].extend(shuffled[:n_train])
        parts[1].extend(shuffled[n_train : n_train + n_val])
        parts[2].extend(shuffled[n_train + n_val :])
    return tuple(DatasetManifest(tuple(p), root=manifest.root) for p in parts)
