"""
Empirical diagnostics on spell samples: memoryless ratios, quantile pairs,
cumulative-frequency ratios and summary statistics.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy.stats import skew

from config import get_config
from errors import InvalidArgumentError
from samples import SpellSample
from distributions import LerchModel, PmfTable

logger = logging.getLogger(__name__)

Law = Union[LerchModel, PmfTable]
QUANTILE_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class RatioSeries:
    """S_{r+1}/S_r at the reported lengths r, with S_r = #{values >= r}"""

    r: np.ndarray
    ratios: np.ndarray
    at_risk: np.ndarray
    min_count: int

    def __len__(self) -> int:
        return int(self.r.size)

    def as_pairs(self) -> List[Tuple[int, float]]:
        return [(int(r), float(v)) for r, v in zip(self.r, self.ratios)]

    def to_dict(self) -> Dict[str, object]:
        return {
            "min_count": self.min_count,
            "r": [int(v) for v in self.r],
            "ratio": [float(v) for v in self.ratios],
            "at_risk": [int(v) for v in self.at_risk],
        }


def survival_ratios(sample: SpellSample, min_count: Optional[int] = None) -> RatioSeries:
    """Observed S_{r+1}/S_r for every length r observed at least min_count times.

    With min_count = 0 every r from 1 to the largest value is reported.
    """
    if min_count is None:
        min_count = get_config().diagnostics.RATIO_MIN_COUNT
    if min_count < 0:
        raise InvalidArgumentError(f"min_count must be >= 0, got {min_count}")
    if sample.is_empty:
        raise InvalidArgumentError(f"survival ratios need a non-empty sample ({sample.label()})")

    freq = sample.frequencies()
    at_risk = np.cumsum(freq[::-1])[::-1]
    next_at_risk = np.concatenate((at_risk[1:], [0]))
    r = np.arange(1, freq.size + 1)
    keep = (freq >= min_count) & (at_risk > 0)
    ratios = next_at_risk[keep] / at_risk[keep]
    return RatioSeries(r=r[keep], ratios=ratios.astype(float), at_risk=at_risk[keep], min_count=int(min_count))


def theoretical_survival_ratios(law: Law, r_max: int) -> np.ndarray:
    """P(X >= r + 1) / P(X >= r) for r = 1..r_max"""
    if r_max < 1:
        raise InvalidArgumentError(f"r_max must be >= 1, got {r_max}")
    r = np.arange(1, r_max + 1)
    if isinstance(law, LerchModel):
        return 1.0 - np.asarray(law.hazard(r), dtype=float)
    upper = np.asarray(law.survival(np.arange(0, r_max + 1)), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(upper[:-1] > 0, upper[1:] / upper[:-1], np.nan)


def empirical_quantile(values: np.ndarray, q: float) -> int:
    """Smallest observed value whose empirical cdf reaches q"""
    if not 0.0 < q < 1.0:
        raise InvalidArgumentError(f"q must lie in (0, 1), got {q}")
    ordered = np.sort(np.asarray(values))
    if ordered.size == 0:
        raise InvalidArgumentError("empirical quantile of an empty sample")
    ecdf = np.arange(1, ordered.size + 1) / ordered.size
    idx = int(np.searchsorted(ecdf, q - QUANTILE_SLACK, side="left"))
    return int(ordered[min(idx, ordered.size - 1)])


def quantile_compare(sample: SpellSample, model: Law, q: Optional[float] = None) -> Dict[str, int]:
    """Empirical and model quantile at level q"""
    settings = get_config().diagnostics
    if q is None:
        q = settings.QUANTILE_LEVEL
    if sample.n < settings.QUANTILE_MIN_SAMPLE:
        logger.warning("%s: %d values are few for a %.3g quantile", sample.label(), sample.n, q)
    return {"empirical": empirical_quantile(sample.values, q), "theoretical": int(model.quantile(q))}


def standard_error_of_estimate(pairs: Iterable[Dict[str, int]]) -> float:
    """Root-mean-square difference between empirical and theoretical quantiles"""
    diffs = np.array([p["empirical"] - p["theoretical"] for p in pairs], dtype=float)
    if diffs.size == 0:
        raise InvalidArgumentError("standard error of estimate needs at least one quantile pair")
    return float(np.sqrt(np.mean(diffs ** 2)))


def _ecdf_on(values: np.ndarray, k_max: int) -> np.ndarray:
    counts = np.bincount(values, minlength=k_max + 1)[1:k_max + 1]
    return np.cumsum(counts) / values.size


def cumfreq_ratio(spell: SpellSample, chain: SpellSample) -> List[Tuple[int, float]]:
    """(k, F_spell(k) / F_chain(k)) wherever F_chain(k) > 0"""
    if chain.is_empty:
        raise InvalidArgumentError(f"cumulative frequency ratio needs a non-empty chain sample ({chain.label()})")
    if spell.is_empty:
        raise InvalidArgumentError(f"cumulative frequency ratio needs a non-empty spell sample ({spell.label()})")
    if spell.station != chain.station or spell.period != chain.period:
        logger.warning("comparing %s with %s from a different station or period", spell.label(), chain.label())

    k_max = int(max(spell.values.max(), chain.values.max()))
    f_spell = _ecdf_on(spell.values, k_max)
    f_chain = _ecdf_on(chain.values, k_max)
    k = np.flatnonzero(f_chain > 0)
    return [(int(i) + 1, float(f_spell[i] / f_chain[i])) for i in k]


def summary_stats(sample: SpellSample) -> Dict[str, Optional[float]]:
    """Five-number summary (linear-interpolation quartiles), mean, std and skewness.

    std uses the n - 1 denominator and skewness the adjusted Fisher-Pearson
    estimator; skewness is None when the sample is constant or shorter than 3.
    """
    if sample.is_empty:
        raise InvalidArgumentError(f"summary statistics need a non-empty sample ({sample.label()})")
    x = sample.values.astype(float)
    q1, median, q3 = np.quantile(x, [0.25, 0.5, 0.75], method="linear")
    std = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    skewness = None
    if x.size >= 3 and std > 0:
        skewness = float(skew(x, bias=False))
    return {
        "n": int(x.size),
        "min": float(x.min()),
        "q1": float(q1),
        "median": float(median),
        "q3": float(q3),
        "max": float(x.max()),
        "mean": float(x.mean()),
        "std": std,
        "skewness": skewness,
    }
