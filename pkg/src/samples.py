"""
Duration samples shared by every analysis area.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from errors import InvalidArgumentError


class Variable(Enum):
    """The five time variables of rainfall occurrence"""
    IT = "it"
    WS = "ws"
    DS = "ds"
    WCH = "wch"
    DCH = "dch"


# Period labels used by reports; custom month sets carry their own label
YEAR = "Year"
S1 = "S1"
S2 = "S2"


@dataclass(frozen=True, eq=False)
class SpellSample:
    """Positive integer durations for one variable, with extraction metadata.

    An empty sample is valid (fewer than two rainy days, a season without
    spells); fitting refuses it later. ``diagnostic`` explains why a sample
    is empty or short.
    """

    variable: Variable
    values: np.ndarray
    period: str = YEAR
    station: str = ""
    censored_count: int = 0
    diagnostic: Optional[str] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64).reshape(-1)
        if values.size and values.min() < 1:
            raise InvalidArgumentError(
                f"{self.variable.value} durations must be >= 1, got minimum {values.min()}")
        object.__setattr__(self, "values", values)

    @classmethod
    def of(cls, variable: Variable, values: Sequence[int], **kwargs) -> "SpellSample":
        return cls(variable=variable, values=np.asarray(values, dtype=np.int64), **kwargs)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def is_empty(self) -> bool:
        return self.values.size == 0

    def frequencies(self) -> np.ndarray:
        """Counts per value k = 1..max (index 0 holds k = 1)"""
        if self.is_empty:
            return np.zeros(0, dtype=np.int64)
        return np.bincount(self.values, minlength=int(self.values.max()) + 1)[1:]

    def with_values(self, values: Sequence[int]) -> "SpellSample":
        return SpellSample(variable=self.variable, values=np.asarray(values, dtype=np.int64),
                           period=self.period, station=self.station)

    def label(self) -> str:
        parts = [p for p in (self.station, self.period, self.variable.value) if p]
        return "/".join(parts)
