"""
Pearson chi-square statistic with a Monte-Carlo null distribution.

Replicate samples are drawn from the model under test and scored over the
same classes as the observed sample; the p-value is the fraction of
replicate statistics strictly greater than the observed one.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np

import rng as rng_module
from config import get_config
from errors import InvalidArgumentError, SpellkitError
from samples import SpellSample
from distributions import LerchModel, PmfTable, sample_values
from inference import fit_mle
from .frequency import Binning, FrequencyTable, smooth_outliers

logger = logging.getLogger(__name__)

ModelLike = Union[LerchModel, PmfTable]


@dataclass(frozen=True, eq=False)
class GofResult:
    chi2_ref: float
    replicate_stats: np.ndarray
    p_value: float
    classes: Binning
    smoothed: bool
    refit: bool = False

    @property
    def replicates(self) -> int:
        return int(self.replicate_stats.size)

    def to_dict(self) -> Dict[str, object]:
        finite = self.replicate_stats[np.isfinite(self.replicate_stats)]
        return {
            "chi2_ref": self.chi2_ref if np.isfinite(self.chi2_ref) else None,
            "p_value": self.p_value,
            "replicates": self.replicates,
            "n_classes": self.classes.n_classes,
            "smoothed": self.smoothed,
            "refit": self.refit,
            "replicate_chi2_mean": float(finite.mean()) if finite.size else None,
            "replicate_chi2_q95": float(np.quantile(finite, 0.95)) if finite.size else None,
        }


def class_probabilities(model: ModelLike, classes: Binning) -> np.ndarray:
    """P(class) under the model; the open last class takes the survival beyond it"""
    upper = np.asarray(model.survival(classes.lower_bounds - 1), dtype=float)
    probs = upper - np.append(upper[1:], 0.0)
    return np.clip(probs, 0.0, None)


def _pearson(observed: np.ndarray, expected: np.ndarray) -> float:
    empty = expected <= 0.0
    if np.any(empty & (observed > 0)):
        return float("inf")
    diff = observed[~empty] - expected[~empty]
    return float(np.sum(diff * diff / expected[~empty]))


def chi2_statistic(observed: FrequencyTable, model: ModelLike, classes: Optional[Binning] = None) -> float:
    """Sum over classes of (O - E)^2 / E with E = N P(class).

    Classes with E = 0 and O = 0 contribute nothing; E = 0 with O > 0 gives
    +inf. Default classes: one per value up to the largest observed plus an
    open tail class.
    """
    if observed.is_empty:
        raise InvalidArgumentError("chi-square statistic of an empty frequency table")
    if classes is None:
        classes = Binning.per_value(observed.k_max)
    return _pearson(classes.aggregate(observed), observed.total * class_probabilities(model, classes))


def _as_seed_sequence(stream) -> np.random.SeedSequence:
    if stream is None:
        return rng_module.substream("gof")
    if isinstance(stream, np.random.SeedSequence):
        return stream
    if isinstance(stream, (int, np.integer)):
        return np.random.SeedSequence(int(stream))
    raise InvalidArgumentError("mc_gof needs a SeedSequence or integer seed so replicates get their own substreams")


def mc_gof(sample: SpellSample, model: ModelLike, replicates: Optional[int] = None,
           stream: Union[np.random.SeedSequence, int, None] = None,
           classes: Optional[Binning] = None, smooth: Optional[bool] = None,
           gap_threshold: Optional[int] = None, refit: Optional[bool] = None,
           threads: Optional[int] = None) -> GofResult:
    """Simulated chi-square goodness-of-fit test.

    Args:
        sample: the observed durations
        model: fitted LerchModel or a derived PmfTable
        replicates: number of simulated samples (>= 100)
        stream: substream; replicate j draws from its child (j,)
        classes: binning, default per value up to the observed maximum
        smooth: smooth outliers in the observed table before scoring
        gap_threshold: zero-run length that marks an outlier
        refit: re-estimate the model on every replicate (LerchModel only)
        threads: worker threads; the p-value does not depend on it

    Returns:
        GofResult with p = #(chi2_j > chi2_ref) / replicates
    """
    cfg = get_config()
    replicates = cfg.gof.REPLICATES if replicates is None else replicates
    smooth = cfg.gof.SMOOTH if smooth is None else smooth
    refit = cfg.gof.REFIT_REPLICATES if refit is None else refit
    threads = cfg.runtime.THREADS if threads is None else threads
    if replicates < cfg.gof.MIN_REPLICATES:
        raise InvalidArgumentError(f"at least {cfg.gof.MIN_REPLICATES} replicates are required, got {replicates}")
    if refit and not isinstance(model, LerchModel):
        raise InvalidArgumentError("refitting replicates needs a fitted LerchModel")

    observed = FrequencyTable.from_sample(sample)
    if observed.is_empty:
        raise InvalidArgumentError(f"goodness of fit on an empty sample ({sample.label()})")
    if classes is None:
        classes = Binning.per_value(observed.k_max)
    if smooth:
        observed = smooth_outliers(observed, gap_threshold)

    n = int(round(observed.total))
    expected = n * class_probabilities(model, classes)
    chi2_ref = _pearson(classes.aggregate(observed), expected)

    seed_seq = _as_seed_sequence(stream)
    table = model.to_pmf_table() if isinstance(model, LerchModel) else model

    def draw(gen: np.random.Generator) -> np.ndarray:
        if isinstance(model, LerchModel):
            return sample_values(model.params, gen, n, table)
        return table.sample(gen, n)

    def replicate(j: int) -> float:
        gen = rng_module.child_generator(seed_seq, j)
        values = draw(gen)
        probs = expected
        if refit:
            probs = _refit_expected(values, model, classes, n, expected)
        return _pearson(classes.classify(values), probs)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stats = np.fromiter(pool.map(replicate, range(replicates)), dtype=float, count=replicates)
    else:
        stats = np.fromiter((replicate(j) for j in range(replicates)), dtype=float, count=replicates)

    p_value = float(np.count_nonzero(stats > chi2_ref)) / replicates
    logger.debug("chi2_ref=%.4g p=%.4f over %d replicates", chi2_ref, p_value, replicates)
    return GofResult(chi2_ref=chi2_ref, replicate_stats=stats, p_value=p_value, classes=classes,
                     smoothed=bool(smooth), refit=bool(refit))


def _refit_expected(values: np.ndarray, model: LerchModel, classes: Binning, n: int,
                    fallback: np.ndarray) -> np.ndarray:
    try:
        fit = fit_mle(values, model.family)
    except SpellkitError as exc:
        logger.debug("replicate refit failed (%s); keeping the null model", exc)
        return fallback
    return n * class_probabilities(fit.model, classes)
