"""
Extraction settings and the seasonal split of an indicator.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

import numpy as np

from config import get_config
from errors import InvalidArgumentError
from samples import S1, S2, YEAR
from .series import RainyIndicator, months_of

ALL_MONTHS = frozenset(range(1, 13))


@dataclass(frozen=True)
class Season:
    label: str
    months: FrozenSet[int]

    def __post_init__(self):
        months = frozenset(int(m) for m in self.months)
        if not months or not months <= ALL_MONTHS:
            raise InvalidArgumentError(f"season {self.label} needs months within 1..12, got {sorted(months)}")
        object.__setattr__(self, "months", months)

    @property
    def is_year(self) -> bool:
        return self.months == ALL_MONTHS


def standard_seasons() -> Dict[str, Season]:
    settings = get_config().extraction
    return {
        "year": Season(YEAR, ALL_MONTHS),
        "s1": Season(S1, frozenset(settings.S1_MONTHS)),
        "s2": Season(S2, frozenset(settings.S2_MONTHS)),
    }


@dataclass(frozen=True)
class ExtractionConfig:
    """Threshold, requested seasons, assignment rule and censored policy"""

    threshold: float = 1.0
    seasons: Tuple[Season, ...] = field(default_factory=lambda: (standard_seasons()["year"],))
    assignment: str = "start"
    censored_policy: str = "include"

    def __post_init__(self):
        if not self.threshold > 0:
            raise InvalidArgumentError(f"threshold must be positive, got {self.threshold}")
        if self.assignment not in ("start", "end"):
            raise InvalidArgumentError(f"assignment must be 'start' or 'end', got '{self.assignment}'")
        if self.censored_policy not in ("include", "exclude"):
            raise InvalidArgumentError(f"censored policy must be 'include' or 'exclude', got '{self.censored_policy}'")
        if not self.seasons:
            raise InvalidArgumentError("at least one season is required")
        labels = [s.label for s in self.seasons]
        if len(set(labels)) != len(labels):
            raise InvalidArgumentError(f"duplicate season labels: {labels}")
        partial = [s for s in self.seasons if not s.is_year]
        if len(partial) > 1:
            covered = [m for s in partial for m in s.months]
            if len(covered) != len(set(covered)) or set(covered) != ALL_MONTHS:
                raise InvalidArgumentError("seasons requested together must partition the year")

    @classmethod
    def for_choice(cls, choice: str = "year", threshold: Optional[float] = None,
                   assignment: Optional[str] = None, censored_policy: Optional[str] = None) -> "ExtractionConfig":
        """Config for a CLI season choice: year, s1, s2 or all"""
        settings = get_config().extraction
        known = standard_seasons()
        choice = choice.lower()
        if choice == "all":
            seasons = (known["year"], known["s1"], known["s2"])
        elif choice in known:
            seasons = (known[choice],)
        else:
            raise InvalidArgumentError(f"unknown season '{choice}' (year, s1, s2, all)")
        return cls(threshold=settings.THRESHOLD_MM if threshold is None else threshold,
                   seasons=seasons,
                   assignment=assignment or settings.ASSIGNMENT_RULE,
                   censored_policy=censored_policy or settings.CENSORED_POLICY)

    @classmethod
    def custom(cls, label: str, months: Iterable[int], **kwargs) -> "ExtractionConfig":
        return cls(seasons=(Season(label, frozenset(months)),), **kwargs)

    def to_dict(self) -> Dict[str, object]:
        return {
            "threshold_mm": self.threshold,
            "seasons": {s.label: sorted(s.months) for s in self.seasons},
            "assignment": self.assignment,
            "censored_policy": self.censored_policy,
        }


def split_seasons(ind: RainyIndicator, cfg: ExtractionConfig) -> Dict[str, RainyIndicator]:
    """One indicator per requested season.

    The flags are shared; each season only carries the mask of days a spell
    may be assigned to, so a spell crossing a season boundary keeps its full
    length and is counted in the season of its start (or end) day.
    """
    months = months_of(ind.dates)
    out = {}
    for season in cfg.seasons:
        mask = None if season.is_year else np.isin(months, sorted(season.months))
        out[season.label] = ind.with_season(season.label, mask, cfg.assignment, cfg.censored_policy)
    return out
