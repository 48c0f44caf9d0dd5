"""
Synthetic rainfall stations.

Occurrence follows either an alternating renewal process (wet and dry spell
lengths drawn from per-season Lerch laws, the season taken at the first day
of each spell) or a plain renewal process on inter-arrival times. Depths are
drawn above the threshold on rainy days and below it on dry days, so marking
the series at the same threshold recovers the simulated occurrence exactly.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
import pandas as pd

import rng as rng_module
from config import get_config
from errors import InvalidArgumentError
from samples import S1, S2, YEAR
from distributions import LerchModel, sample_values
from extraction import RainfallSeries
from extraction.series import DRY, RAINY, months_of

logger = logging.getLogger(__name__)

WET_DEPTH_SHAPE = 0.75
WET_DEPTH_SCALE = 8.0
DRIZZLE_PROBABILITY = 0.3
DRAW_CHUNK = 1024


@dataclass(frozen=True)
class SpellLaws:
    """Wet- and dry-spell laws of one season"""
    ws: LerchModel
    ds: LerchModel


@dataclass(frozen=True)
class StationProfile:
    """Everything that defines a synthetic station.

    ``spell_laws`` maps a period label (Year, or S1 and S2) to the spell
    laws; ``it_law`` switches to the renewal process and takes precedence.
    """

    name: str = "SYN"
    start: str = "1951-01-01"
    years: int = 30
    spell_laws: Dict[str, SpellLaws] = field(default_factory=dict)
    it_law: Optional[LerchModel] = None
    threshold: float = 1.0
    missing_rate: float = 0.0

    def __post_init__(self):
        if self.years < 1:
            raise InvalidArgumentError(f"years must be >= 1, got {self.years}")
        if not 0.0 <= self.missing_rate < 1.0:
            raise InvalidArgumentError(f"missing_rate must lie in [0, 1), got {self.missing_rate}")
        if not self.threshold > 0:
            raise InvalidArgumentError(f"threshold must be positive, got {self.threshold}")
        if self.it_law is None:
            labels = set(self.spell_laws)
            if labels != {YEAR} and labels != {S1, S2}:
                raise InvalidArgumentError(f"spell laws must cover either {YEAR} or {S1} and {S2}, got {sorted(labels)}")


def bundled_profile(years: int = 30, name: str = "SYN") -> StationProfile:
    """Seasonal station used by examples, tests and the calibration script"""
    return StationProfile(
        name=name,
        years=years,
        spell_laws={
            S1: SpellLaws(ws=LerchModel.geometric(0.40), ds=LerchModel.polylog(0.93, 0.45)),
            S2: SpellLaws(ws=LerchModel.geometric(0.50), ds=LerchModel.polylog(0.90, 0.50)),
        },
    )


def renewal_profile(years: int = 30, name: str = "SYN-IT") -> StationProfile:
    """Renewal station with a long-tailed three-parameter inter-arrival law"""
    return StationProfile(name=name, years=years, it_law=LerchModel.lerch3(0.913, 0.442, -0.953))


class _Pool:
    """Chunked draws from one law, consumed one value at a time"""

    def __init__(self, model: LerchModel, gen: np.random.Generator):
        self.model = model
        self.gen = gen
        self.table = model.to_pmf_table()
        self.values = np.zeros(0, dtype=np.int64)
        self.pos = 0

    def next(self) -> int:
        if self.pos >= self.values.size:
            self.values = sample_values(self.model.params, self.gen, DRAW_CHUNK, self.table)
            self.pos = 0
        value = int(self.values[self.pos])
        self.pos += 1
        return value


class SyntheticStationGenerator:
    """Deterministic synthetic daily rainfall for a StationProfile"""

    def __init__(self, profile: StationProfile):
        self.profile = profile
        start = pd.Timestamp(profile.start)
        days = pd.date_range(start, start + pd.DateOffset(years=profile.years), freq="D", inclusive="left")
        self.dates = days.to_numpy().astype("datetime64[D]")

    @property
    def n_days(self) -> int:
        return int(self.dates.size)

    def _season_labels(self) -> np.ndarray:
        if YEAR in self.profile.spell_laws:
            return np.full(self.n_days, YEAR, dtype=object)
        in_s1 = np.isin(months_of(self.dates), get_config().extraction.S1_MONTHS)
        return np.where(in_s1, S1, S2).astype(object)

    def _alternating_flags(self, gen: np.random.Generator) -> np.ndarray:
        seasons = self._season_labels()
        pools = {
            (label, kind): _Pool(getattr(laws, kind), gen)
            for label, laws in sorted(self.profile.spell_laws.items())
            for kind in ("ws", "ds")
        }
        flags = np.empty(self.n_days, dtype=np.int8)
        wet = bool(gen.random() < 0.5)
        pos = 0
        while pos < self.n_days:
            length = pools[(seasons[pos], "ws" if wet else "ds")].next()
            flags[pos:pos + length] = RAINY if wet else DRY
            pos += length
            wet = not wet
        return flags

    def _renewal_flags(self, gen: np.random.Generator) -> np.ndarray:
        pool = _Pool(self.profile.it_law, gen)
        flags = np.full(self.n_days, DRY, dtype=np.int8)
        pos = pool.next() - 1
        while pos < self.n_days:
            flags[pos] = RAINY
            pos += pool.next()
        return flags

    def _depths(self, flags: np.ndarray, gen: np.random.Generator) -> np.ndarray:
        h = self.profile.threshold
        wet = np.ceil((h + gen.gamma(WET_DEPTH_SHAPE, WET_DEPTH_SCALE, self.n_days)) * 10.0) / 10.0
        drizzle = np.floor(gen.random(self.n_days) * h * 10.0) / 10.0
        drizzle = np.where(drizzle < h, drizzle, 0.0)
        dry = np.where(gen.random(self.n_days) < DRIZZLE_PROBABILITY, drizzle, 0.0)
        return np.where(flags == RAINY, wet, dry)

    def generate(self, gen: Optional[np.random.Generator] = None) -> RainfallSeries:
        """Simulate the station; the default generator is the ('synthetic', name) substream"""
        if gen is None:
            gen = rng_module.generator("synthetic", self.profile.name)
        if self.profile.it_law is not None:
            flags = self._renewal_flags(gen)
        else:
            flags = self._alternating_flags(gen)
        depths = self._depths(flags, gen)
        if self.profile.missing_rate > 0:
            depths[gen.random(self.n_days) < self.profile.missing_rate] = np.nan
        logger.info("synthetic station %s: %d days, %d rainy", self.profile.name, self.n_days,
                    int(np.count_nonzero(flags == RAINY)))
        return RainfallSeries(self.dates, depths, station=self.profile.name)
