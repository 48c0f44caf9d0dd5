"""
Mann-Kendall trend test and the Hamed-Rao variance correction for
autocorrelated series.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import pymannkendall
from scipy.stats import norm, rankdata

from config import get_config
from errors import InvalidArgumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrendResult:
    tau: float
    S: int
    variance: float
    corrected_variance: float
    z: float
    p_classical: float
    p_corrected: float
    n: int
    correction_factor: float = 1.0
    degenerate: bool = False

    def significant(self, alpha: float = 0.05, corrected: bool = True) -> bool:
        return (self.p_corrected if corrected else self.p_classical) < alpha

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "tau": self.tau,
            "S": self.S,
            "variance": self.variance,
            "corrected_variance": self.corrected_variance,
            "correction_factor": self.correction_factor,
            "z": self.z,
            "p_classical": self.p_classical,
            "p_corrected": self.p_corrected,
            "degenerate": self.degenerate,
        }


def _as_series(series: Sequence[float], minimum: int) -> np.ndarray:
    x = np.asarray(series, dtype=float).reshape(-1)
    if np.any(np.isnan(x)):
        raise InvalidArgumentError("trend tests do not accept missing values")
    if x.size < minimum:
        raise InvalidArgumentError(f"trend test needs at least {minimum} values, got {x.size}")
    return x


def _p_value(z: float) -> float:
    return float(2.0 * norm.sf(abs(z)))


def _tau_b(s: int, x: np.ndarray) -> float:
    n = float(x.size)
    n0 = n * (n - 1) / 2.0
    tp = _tie_sizes(x)
    n1 = float(np.sum(tp * (tp - 1) / 2.0))
    denom = np.sqrt((n0 - n1) * n0)
    return float(s / denom) if denom > 0 else 0.0


def _acf(x: np.ndarray, nlags: int) -> np.ndarray:
    y = x - x.mean()
    n = x.size
    acov = np.correlate(y, y, "full")[n - 1:] / n
    if acov[0] == 0:
        return np.zeros(nlags + 1)
    return acov[:nlags + 1] / acov[0]


def _tie_sizes(x: np.ndarray) -> np.ndarray:
    _, counts = np.unique(x, return_counts=True)
    return counts.astype(float)


def _classical(x: np.ndarray) -> TrendResult:
    if np.all(x == x[0]):
        # a single tie group cancels the whole variance
        logger.warning("constant series: Mann-Kendall statistic is degenerate")
        return TrendResult(tau=0.0, S=0, variance=0.0, corrected_variance=0.0, z=0.0,
                           p_classical=1.0, p_corrected=1.0, n=int(x.size), degenerate=True)
    mk = pymannkendall.original_test(x)
    s = int(round(mk.s))
    return TrendResult(tau=_tau_b(s, x), S=s, variance=float(mk.var_s), corrected_variance=float(mk.var_s),
                       z=float(mk.z), p_classical=float(mk.p), p_corrected=float(mk.p), n=int(x.size))


def mk_test(series: Sequence[float]) -> TrendResult:
    """Mann-Kendall test with tie-corrected variance and continuity-corrected z.

    S, its variance, z and the two-sided normal p-value come from
    pymannkendall.original_test; tau is Kendall's tau-b. A constant series
    gives S = 0, tau = 0, p = 1 and is flagged degenerate.
    """
    return _classical(_as_series(series, get_config().diagnostics.MK_MIN_LENGTH))


def hamed_rao_factor(x: np.ndarray, max_lag: int) -> float:
    """1 + 2 / (n(n-1)(n-2)) sum_i (n-i)(n-i-1)(n-i-2) rho(i) over significant lags"""
    settings = get_config().diagnostics
    n = x.size
    max_lag = min(max_lag, n - 1)
    rho = _acf(rankdata(x), max_lag)[1:]
    band = settings.SIGNIFICANCE_BAND / np.sqrt(n)
    lags = np.arange(1, max_lag + 1)
    significant = np.abs(rho) > band
    if not np.any(significant):
        return 1.0
    i = lags[significant].astype(float)
    total = np.sum((n - i) * (n - i - 1) * (n - i - 2) * rho[significant])
    return float(1.0 + 2.0 / (n * (n - 1) * (n - 2)) * total)


def mk_test_corrected(series: Sequence[float], max_lag: Optional[int] = None) -> TrendResult:
    """Mann-Kendall test with the Hamed-Rao variance correction.

    The rank autocorrelation is taken on the ranked series; lags up to
    max_lag whose autocorrelation falls outside +/-1.96/sqrt(n) enter the
    correction factor. A non-positive factor falls back to 1.
    """
    settings = get_config().diagnostics
    if max_lag is None:
        max_lag = settings.MAX_LAG
    if max_lag < 1:
        raise InvalidArgumentError(f"max_lag must be >= 1, got {max_lag}")
    x = _as_series(series, settings.MK_CORRECTED_MIN_LENGTH)
    base = _classical(x)
    if base.degenerate:
        return base

    factor = hamed_rao_factor(x, max_lag)
    if factor <= 0:
        logger.warning("Hamed-Rao factor %.4g is not positive; using the uncorrected variance", factor)
        factor = 1.0
    corrected = base.variance * factor
    z = base.z / np.sqrt(factor)
    return TrendResult(tau=base.tau, S=base.S, variance=base.variance, corrected_variance=float(corrected),
                       z=float(z), p_classical=base.p_classical, p_corrected=_p_value(z), n=base.n,
                       correction_factor=factor)
