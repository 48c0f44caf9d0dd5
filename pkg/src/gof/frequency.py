"""
Observed frequency tables, class construction and outlier smoothing.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from config import get_config
from errors import InvalidArgumentError
from samples import SpellSample

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FrequencyTable:
    """Counts per value k = 1..k_max (real-valued so smoothing can spread mass)"""

    counts: np.ndarray
    total: float

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float).reshape(-1)
        if counts.size and (not np.all(np.isfinite(counts)) or counts.min() < 0):
            raise InvalidArgumentError("frequency counts must be finite and non-negative")
        if abs(counts.sum() - float(self.total)) > 1e-9 * max(1.0, float(self.total)):
            raise InvalidArgumentError(f"counts sum to {counts.sum()}, declared total {self.total}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", float(self.total))

    @classmethod
    def from_values(cls, values: Union[Sequence[int], np.ndarray]) -> "FrequencyTable":
        values = np.asarray(values, dtype=np.int64).reshape(-1)
        if values.size == 0:
            return cls(np.zeros(0), 0.0)
        if values.min() < 1:
            raise InvalidArgumentError("durations must be >= 1")
        counts = np.bincount(values, minlength=int(values.max()) + 1)[1:].astype(float)
        return cls(counts, float(values.size))

    @classmethod
    def from_sample(cls, sample: SpellSample) -> "FrequencyTable":
        return cls.from_values(sample.values)

    @classmethod
    def from_mapping(cls, counts: Dict[int, float]) -> "FrequencyTable":
        if not counts:
            return cls(np.zeros(0), 0.0)
        k_max = max(counts)
        arr = np.zeros(k_max)
        for k, c in counts.items():
            if k < 1:
                raise InvalidArgumentError(f"values must be >= 1, got {k}")
            arr[k - 1] = c
        return cls(arr, float(arr.sum()))

    @property
    def k_max(self) -> int:
        return int(self.counts.size)

    @property
    def is_empty(self) -> bool:
        return self.total == 0.0

    def count(self, k: int) -> float:
        return float(self.counts[k - 1]) if 1 <= k <= self.k_max else 0.0

    def relative(self) -> np.ndarray:
        return self.counts / self.total if self.total > 0 else self.counts.copy()


@dataclass(frozen=True, eq=False)
class Binning:
    """Contiguous classes [b_0, b_1), ..., [b_last, infinity) with b_0 = 1"""

    lower_bounds: np.ndarray

    def __post_init__(self):
        bounds = np.asarray(self.lower_bounds, dtype=np.int64).reshape(-1)
        if bounds.size == 0 or bounds[0] != 1:
            raise InvalidArgumentError("classes must start at 1")
        if np.any(np.diff(bounds) <= 0):
            raise InvalidArgumentError("class lower bounds must be strictly increasing")
        object.__setattr__(self, "lower_bounds", bounds)

    @classmethod
    def per_value(cls, max_observed: int) -> "Binning":
        """One class per value 1..max_observed plus the open class > max_observed"""
        return cls(np.arange(1, max(int(max_observed), 0) + 2))

    @property
    def n_classes(self) -> int:
        return int(self.lower_bounds.size)

    def classify(self, values: np.ndarray) -> np.ndarray:
        """Counts per class for integer values"""
        idx = np.searchsorted(self.lower_bounds, np.asarray(values), side="right") - 1
        return np.bincount(idx, minlength=self.n_classes).astype(float)

    def aggregate(self, table: FrequencyTable) -> np.ndarray:
        """Counts per class from a frequency table"""
        if table.k_max == 0:
            return np.zeros(self.n_classes)
        k = np.arange(1, table.k_max + 1)
        idx = np.searchsorted(self.lower_bounds, k, side="right") - 1
        return np.bincount(idx, weights=table.counts, minlength=self.n_classes)

    def labels(self) -> List[str]:
        out = []
        for lo, hi in zip(self.lower_bounds[:-1], self.lower_bounds[1:]):
            out.append(str(lo) if hi == lo + 1 else f"{lo}-{hi - 1}")
        out.append(f">={self.lower_bounds[-1]}")
        return out


def smooth_outliers(table: FrequencyTable, gap_threshold: Optional[int] = None,
                    max_count: Optional[float] = None) -> FrequencyTable:
    """Spread isolated high values back over the gap that precedes them.

    A value v with a count of at most max_count whose preceding run of
    zero-count values has length >= gap_threshold is treated as an outlier:
    its count is spread uniformly over u+1..v, u being the nearest value below
    v with a non-zero count in the input table. Values are handled from the
    largest down; total mass is unchanged.
    """
    settings = get_config().gof
    if gap_threshold is None:
        gap_threshold = settings.GAP_THRESHOLD
    if max_count is None:
        max_count = settings.OUTLIER_MAX_COUNT
    if gap_threshold < 1:
        raise InvalidArgumentError(f"gap_threshold must be >= 1, got {gap_threshold}")

    original = table.counts
    nonzero = np.flatnonzero(original > 0)
    if nonzero.size < 2:
        return table

    smoothed = original.copy()
    spread = 0
    for pos in range(nonzero.size - 1, 0, -1):
        v, u = nonzero[pos], nonzero[pos - 1]
        gap = v - u - 1
        count = original[v]
        if gap >= gap_threshold and count <= max_count:
            smoothed[v] -= count
            smoothed[u + 1:v + 1] += count / (v - u)
            spread += 1
    if spread:
        logger.debug("smoothed %d outlier value(s)", spread)
    return FrequencyTable(smoothed, table.total)
