"""Logged choice observations and their stacked array view."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# raw feature columns, in utility-coefficient order (PA, H, TC)
FEATURES = ("degree", "similarity", "common_neighbors")
FEATURE_LABELS = ("PA", "H", "TC")


class ChoiceDataError(ValueError):
    pass


@dataclass(frozen=True)
class ChoiceObservation:
    """One decision: chooser, presented alternatives with raw (d, w, c), chosen position."""

    chooser: int
    alternatives: tuple[int, ...]
    raw: np.ndarray  # shape (|A|, 3)
    chosen: int

    def __post_init__(self):
        raw = np.asarray(self.raw, dtype=np.float64)
        if raw.ndim != 2 or raw.shape[1] != 3:
            raise ChoiceDataError(f"raw features must have shape (|A|, 3), got {raw.shape}")
        if raw.shape[0] != len(self.alternatives):
            raise ChoiceDataError("raw feature rows do not match the alternative count")
        if len(self.alternatives) == 0:
            raise ChoiceDataError("observation with an empty alternative set")
        if not 0 <= self.chosen < len(self.alternatives):
            raise ChoiceDataError(f"chosen index {self.chosen} out of range")
        raw.setflags(write=False)
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "alternatives", tuple(int(a) for a in self.alternatives))

    @property
    def size(self) -> int:
        return len(self.alternatives)

    @property
    def chosen_id(self) -> int:
        return self.alternatives[self.chosen]


class ChoiceDataset:
    """Ordered observations; ``X`` holds transformed features for all alternatives stacked."""

    def __init__(self, observations: Iterable[ChoiceObservation], x_max: Sequence[float] | None = None):
        from netform.choice.mnl import feature_transform_matrix

        self.observations: list[ChoiceObservation] = list(observations)
        if not self.observations:
            raise ChoiceDataError("empty choice dataset")
        sizes = np.array([o.size for o in self.observations], dtype=np.int64)
        self.offsets = np.zeros(sizes.size + 1, dtype=np.int64)
        np.cumsum(sizes, out=self.offsets[1:])
        self.raw = np.vstack([o.raw for o in self.observations])
        if not np.all(np.isfinite(self.raw)):
            raise ChoiceDataError("non-finite raw features")
        self.chosen_flat = self.offsets[:-1] + np.array([o.chosen for o in self.observations])
        self.group = np.repeat(np.arange(sizes.size), sizes)
        self.X, self.x_max = feature_transform_matrix(self.raw, x_max)

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self):
        return iter(self.observations)

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    def column(self, key: str) -> np.ndarray:
        return self.raw[:, FEATURES.index(key)]
