"""
Derived distributions shared by the direct and indirect methods.

Direct method: wet spells are geometric with continuation p_it(1), dry spells
are the inter-arrival law shifted by one, chains follow from the spells.
Indirect method: the inter-arrival law is rebuilt from separately fitted wet
and dry spell laws.
"""

import logging
import math
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln, xlogy

from config import get_config
from errors import InvalidArgumentError, NumericalDegeneracyError
from distributions import LerchModel, MomentKind, PmfTable, moment, pmf

logger = logging.getLogger(__name__)

SpellLaw = Union[LerchModel, PmfTable]


def _table(law: SpellLaw, tail_eps: Optional[float]) -> PmfTable:
    return law.to_pmf_table(tail_eps) if isinstance(law, LerchModel) else law


def dm_derive_ws(it_model: LerchModel, tail_eps: Optional[float] = None) -> PmfTable:
    """Geometric wet-spell law with continuation probability p_it(1)"""
    settings = get_config()
    if tail_eps is None:
        tail_eps = settings.distributions.TABLE_TAIL_EPS
    p1 = float(pmf(it_model.params, 1))
    if p1 >= settings.methods.MAX_CONTINUATION:
        raise NumericalDegeneracyError(f"p_it(1) = {p1!r} is too close to 1 for a geometric wet-spell law")
    expected_length = math.log(tail_eps) / math.log(p1) if p1 > 0 else 1.0
    if expected_length > settings.distributions.MAX_TABLE_LENGTH:
        raise NumericalDegeneracyError(
            f"p_it(1) = {p1:.12g} needs about {expected_length:.3g} terms to tabulate the wet-spell law")
    return LerchModel.geometric(p1).to_pmf_table(tail_eps)


def dm_derive_ds(it_model: LerchModel, tail_eps: Optional[float] = None) -> PmfTable:
    """p_ds(k) = p_it(k + 1) / (1 - p_it(1))"""
    if tail_eps is None:
        tail_eps = get_config().distributions.TABLE_TAIL_EPS
    p1 = float(pmf(it_model.params, 1))
    rest = 1.0 - p1
    if rest < 1e-12:
        raise NumericalDegeneracyError(f"p_it(1) = {p1!r}: no mass left for dry spells")
    it_table = it_model.to_pmf_table(max(tail_eps * rest, 1e-300))
    probs = it_table.probabilities[1:] / rest
    if probs.size == 0:
        raise NumericalDegeneracyError(f"inter-arrival table of {it_model.describe()} has no mass beyond 1")
    return PmfTable.from_probabilities(probs)


def chain_pmf(p_inner: PmfTable, p_break: float, m_max: Optional[int] = None,
              tail_eps: Optional[float] = None) -> PmfTable:
    """Law of a chain of spells joined by one-day interruptions.

    p_chain(m) = sum_{k=1..m} p_break^(k-1) (1 - p_break) p_inner^{*k}(m), the
    k-fold convolutions being computed iteratively and truncated at m_max.
    Without m_max the truncation doubles until the chain tail is below
    max(tail_eps, 2 E[number of spells] * tail of p_inner).
    """
    settings = get_config().methods
    if tail_eps is None:
        tail_eps = settings.CHAIN_TAIL_EPS
    if not 0.0 <= p_break < 1.0:
        raise InvalidArgumentError(f"p_break must lie in [0, 1), got {p_break}")
    if m_max is not None:
        if m_max < 1:
            raise InvalidArgumentError(f"m_max must be >= 1, got {m_max}")
        return _chain_truncated(p_inner, p_break, int(m_max), tail_eps)

    allowed = max(tail_eps, 2.0 * p_inner.tail_mass / (1.0 - p_break))
    m = max(p_inner.K, 16)
    while True:
        table = _chain_truncated(p_inner, p_break, m, tail_eps)
        if table.tail_mass <= allowed:
            logger.debug("chain table K=%d tail=%.3g (p_break=%.4g)", table.K, table.tail_mass, p_break)
            return table
        if m >= settings.MAX_CHAIN_LENGTH:
            raise NumericalDegeneracyError(
                f"chain tail {table.tail_mass:.3g} still above {allowed:.3g} at length {m}")
        m = min(2 * m, settings.MAX_CHAIN_LENGTH)


def _chain_truncated(p_inner: PmfTable, p_break: float, m: int, tail_eps: float) -> PmfTable:
    n_inner = min(p_inner.K, m)
    inner = np.zeros(n_inner + 1)
    inner[1:] = p_inner.probabilities[:n_inner]

    chain = np.zeros(m + 1)
    power = np.zeros(m + 1)
    power[: n_inner + 1] = inner
    weight = 1.0 - p_break
    remaining = 1.0
    for _ in range(m):
        chain += weight * power
        remaining *= p_break
        weight *= p_break
        if remaining < tail_eps * 1e-3 or not power.any():
            break
        power = np.convolve(power, inner)[: m + 1]
    probs = chain[1:]
    return PmfTable.from_probabilities(probs)


def dm_wch_binomial(it_model: LerchModel, k: int) -> float:
    """Wet-chain probability from the number of one-day holes.

    p_wch(k) = (1 - p1 - p2) sum_j C(k-1, j) p1^(k-1-j) p2^j with p1, p2 the
    first two inter-arrival probabilities.
    """
    if int(k) != k or k < 1:
        raise InvalidArgumentError(f"k must be a positive integer, got {k}")
    k = int(k)
    p1, p2 = (float(v) for v in pmf(it_model.params, np.array([1, 2])))
    j = np.arange(k, dtype=float)
    log_terms = (gammaln(k) - gammaln(j + 1.0) - gammaln(k - j)
                 + xlogy(k - 1.0 - j, p1) + xlogy(j, p2))
    return float((1.0 - p1 - p2) * np.exp(log_terms).sum())


def im_recover_it(ws_law: SpellLaw, ds_law: SpellLaw, tail_eps: Optional[float] = None) -> PmfTable:
    """Inter-arrival law from wet and dry spell laws.

    p_it(1) = (E[ws] - 1) / E[ws] and p_it(k) = p_ds(k - 1) (1 - p_it(1)).
    """
    mean_ws = moment(ws_law.params, MomentKind.MEAN) if isinstance(ws_law, LerchModel) else ws_law.mean()
    if not math.isfinite(mean_ws) or mean_ws < 1.0 - 1e-12:
        raise InvalidArgumentError(f"E[ws] must be finite and >= 1, got {mean_ws}")
    p1 = max(0.0, (mean_ws - 1.0) / mean_ws)
    ds_table = _table(ds_law, tail_eps)
    probs = np.concatenate(([p1], (1.0 - p1) * ds_table.probabilities))
    return PmfTable.from_probabilities(probs)
