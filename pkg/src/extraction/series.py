"""
Daily rainfall series and the rainy/dry/missing indicator derived from it.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from errors import InvalidArgumentError

DRY = 0
RAINY = 1
MISSING = -1

_PATTERN_CODES = {"R": RAINY, "D": DRY, "M": MISSING, ".": MISSING}
DEFAULT_START = np.datetime64("2000-01-01", "D")


def _as_dates(dates) -> np.ndarray:
    return np.asarray(dates, dtype="datetime64[D]").reshape(-1)


def months_of(dates: np.ndarray) -> np.ndarray:
    """Calendar month (1-12) of each date"""
    return dates.astype("datetime64[M]").astype(np.int64) % 12 + 1


@dataclass(frozen=True, eq=False)
class RainfallSeries:
    """Contiguous daily depths in millimetres; NaN marks a missing day.

    ``inserted_missing`` counts the days added as missing to close date gaps
    in the source file.
    """

    dates: np.ndarray
    depths: np.ndarray
    station: str = ""
    inserted_missing: int = 0

    def __post_init__(self):
        dates = _as_dates(self.dates)
        depths = np.asarray(self.depths, dtype=float).reshape(-1)
        if dates.size != depths.size:
            raise InvalidArgumentError(f"{dates.size} dates but {depths.size} depths")
        if dates.size > 1 and np.any(np.diff(dates).astype(np.int64) != 1):
            raise InvalidArgumentError("dates must be strictly increasing by one day")
        observed = depths[~np.isnan(depths)]
        if observed.size and observed.min() < 0:
            raise InvalidArgumentError("rainfall depths must be non-negative")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "depths", depths)

    @classmethod
    def from_depths(cls, depths: Sequence[float], start=DEFAULT_START, station: str = "") -> "RainfallSeries":
        depths = np.asarray(depths, dtype=float)
        dates = np.datetime64(start, "D") + np.arange(depths.size)
        return cls(dates, depths, station)

    def __len__(self) -> int:
        return int(self.depths.size)

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.depths)

    @property
    def missing_count(self) -> int:
        return int(self.missing.sum())


@dataclass(frozen=True, eq=False)
class RainyIndicator:
    """Per-day flags (RAINY, DRY, MISSING) with the settings that produced them.

    ``season_mask`` selects the days a spell may be assigned to (None means
    the whole record); ``assignment`` says whether a spell is assigned by its
    start day or its end day.
    """

    dates: np.ndarray
    flags: np.ndarray
    threshold: float = 1.0
    station: str = ""
    period: str = "Year"
    season_mask: Optional[np.ndarray] = None
    assignment: str = "start"
    censored_policy: str = "include"

    def __post_init__(self):
        dates = _as_dates(self.dates)
        flags = np.asarray(self.flags, dtype=np.int8).reshape(-1)
        if dates.size != flags.size:
            raise InvalidArgumentError(f"{dates.size} dates but {flags.size} flags")
        if flags.size and not np.all(np.isin(flags, (DRY, RAINY, MISSING))):
            raise InvalidArgumentError("flags must be RAINY, DRY or MISSING")
        if self.assignment not in ("start", "end"):
            raise InvalidArgumentError(f"unknown assignment rule '{self.assignment}'")
        if self.censored_policy not in ("include", "exclude"):
            raise InvalidArgumentError(f"unknown censored policy '{self.censored_policy}'")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "flags", flags)
        if self.season_mask is not None:
            mask = np.asarray(self.season_mask, dtype=bool).reshape(-1)
            if mask.size != flags.size:
                raise InvalidArgumentError("season mask length differs from the indicator")
            object.__setattr__(self, "season_mask", mask)

    @classmethod
    def from_pattern(cls, pattern: str, start=DEFAULT_START, **kwargs) -> "RainyIndicator":
        """Indicator from a string such as 'RRDRDDD' (M or '.' for missing)"""
        try:
            flags = np.array([_PATTERN_CODES[ch] for ch in pattern.replace(" ", "")], dtype=np.int8)
        except KeyError as exc:
            raise InvalidArgumentError(f"unknown day code {exc.args[0]!r}") from None
        dates = np.datetime64(start, "D") + np.arange(flags.size)
        return cls(dates, flags, **kwargs)

    def __len__(self) -> int:
        return int(self.flags.size)

    @property
    def rainy_days(self) -> int:
        return int(np.count_nonzero(self.flags == RAINY))

    def in_season(self, day_index: np.ndarray) -> np.ndarray:
        """Whether each day index lies in this indicator's season"""
        day_index = np.asarray(day_index, dtype=np.int64)
        if self.season_mask is None:
            return np.ones(day_index.shape, dtype=bool)
        return self.season_mask[day_index]

    def with_season(self, period: str, mask: Optional[np.ndarray], assignment: str,
                    censored_policy: str) -> "RainyIndicator":
        return RainyIndicator(self.dates, self.flags, self.threshold, self.station, period, mask,
                              assignment, censored_policy)


def mark_rainy(series: RainfallSeries, h_star: float = 1.0) -> RainyIndicator:
    """Flag each day: rainy when depth >= h_star, missing days stay missing"""
    if not h_star > 0:
        raise InvalidArgumentError(f"threshold must be positive, got {h_star}")
    if len(series) == 0:
        raise InvalidArgumentError("cannot mark an empty series")
    flags = np.where(series.depths >= h_star, RAINY, DRY).astype(np.int8)
    flags[series.missing] = MISSING
    return RainyIndicator(series.dates, flags, threshold=float(h_star), station=series.station)
