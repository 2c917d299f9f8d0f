"""Ordered collections of positive observations."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SOURCES = ("embedded_phosphorus", "file", "simulated")


@dataclass(frozen=True)
class Dataset:
    values: np.ndarray
    label: str = "data"
    source: str = "file"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("dataset is empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("dataset contains non-finite values")
        if self.source not in SOURCES:
            raise ValueError(f"unknown dataset source {self.source!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.label == other.label and self.source == other.source
                and np.array_equal(self.values, other.values))

    __hash__ = None
