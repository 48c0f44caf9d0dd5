"""
Nested model selection with likelihood-ratio tests.

Every sub-family is tested against the 3-parameter Lerch fit on the same
sample; among the sub-families that are not rejected (plus the full model),
the one with the fewest free parameters wins, ties going to the higher
log-likelihood.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from scipy.stats import chi2

from config import get_config
from errors import InconsistentFitsError, InvalidArgumentError, NonConvergenceError, SpellkitError
from distributions import FamilyId
from .likelihood import FittedModel, SampleLike, _check_size, _values_of, fit_mle

logger = logging.getLogger(__name__)

# Final tie-break between equally parsimonious, equally likely candidates
_PARSIMONY_ORDER = [FamilyId.GEOMETRIC, FamilyId.LOGARITHMIC, FamilyId.POLYLOG,
                    FamilyId.EXTENDED_LOG, FamilyId.LERCH3]

SUB_FAMILIES = [FamilyId.POLYLOG, FamilyId.LOGARITHMIC, FamilyId.GEOMETRIC, FamilyId.EXTENDED_LOG]


@dataclass(frozen=True)
class LlrResult:
    D: float
    df: int
    p_value: float


@dataclass
class CandidateRecord:
    """One family's line in the selection trace"""

    family: FamilyId
    loglik: Optional[float] = None
    n_params: int = 0
    converged: bool = False
    D: Optional[float] = None
    df: Optional[int] = None
    p_value: Optional[float] = None
    decision: str = "not tested"
    selected: bool = False
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, object]:
        return {
            "family": self.family.name,
            "loglik": self.loglik,
            "n_params": self.n_params,
            "converged": self.converged,
            "D": self.D,
            "df": self.df,
            "p_value": self.p_value,
            "decision": self.decision,
            "selected": self.selected,
            "error": self.error,
        }


@dataclass
class SelectionTrace:
    chosen: FamilyId
    alpha: float
    records: List[CandidateRecord] = field(default_factory=list)
    fallback: Optional[str] = None

    def record(self, family: FamilyId) -> CandidateRecord:
        for rec in self.records:
            if rec.family is family:
                return rec
        raise KeyError(family)

    def to_dict(self) -> Dict[str, object]:
        return {
            "chosen": self.chosen.name,
            "alpha": self.alpha,
            "fallback": self.fallback,
            "candidates": [rec.to_dict() for rec in self.records],
        }


def llr_test(null_fit: FittedModel, alt_fit: FittedModel) -> LlrResult:
    """Likelihood-ratio test of a nested null fit against an alternative fit.

    D = -2 (loglik_null - loglik_alt) is referred to a chi-square law with as
    many degrees of freedom as the difference in free parameters.

    Raises:
        InvalidArgumentError: the null family is not nested in the alternative,
            or the fits were made on samples of different size
        InconsistentFitsError: D below -LLR_TOLERANCE
    """
    if not null_fit.family.is_nested_in(alt_fit.family):
        raise InvalidArgumentError(f"{null_fit.family.label} is not nested in {alt_fit.family.label}")
    if null_fit.n != alt_fit.n:
        raise InvalidArgumentError(f"fits use different samples (N = {null_fit.n} vs {alt_fit.n})")

    D = -2.0 * (null_fit.loglik - alt_fit.loglik)
    df = alt_fit.n_params - null_fit.n_params
    if D < -get_config().inference.LLR_TOLERANCE:
        raise InconsistentFitsError(
            f"{alt_fit.family.label} log-likelihood {alt_fit.loglik:.8g} is below nested "
            f"{null_fit.family.label} {null_fit.loglik:.8g} (D = {D:.3g})")
    D = max(D, 0.0)
    if df == 0:
        return LlrResult(D=D, df=0, p_value=1.0)
    return LlrResult(D=D, df=df, p_value=float(chi2.sf(D, df)))


def _fit_or_error(sample: SampleLike, family: FamilyId, allow_negative_s: Optional[bool], extra=()):
    try:
        return fit_mle(sample, family, allow_negative_s=allow_negative_s, extra_starts=extra), None
    except SpellkitError as exc:
        logger.warning("%s fit failed: %s", family.label, exc)
        return None, str(exc)


def _rank(fit: FittedModel) -> Tuple[int, float, int]:
    return fit.n_params, -fit.loglik, _PARSIMONY_ORDER.index(fit.family)


def select_model(sample: SampleLike, alpha: Optional[float] = None,
                 allow_negative_s: Optional[bool] = None,
                 threads: Optional[int] = None) -> Tuple[FittedModel, SelectionTrace]:
    """Fit all five families and pick the most parsimonious one not rejected.

    The sub-families are fitted first (concurrently when threads > 1); their
    optima are then offered to the 3-parameter fit as extra starting points.

    Returns:
        (selected fit, selection trace)
    """
    cfg = get_config()
    if alpha is None:
        alpha = cfg.inference.ALPHA
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError(f"alpha must lie in (0, 1), got {alpha}")
    if threads is None:
        threads = cfg.runtime.THREADS
    _check_size(_values_of(sample))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(SUB_FAMILIES))) as pool:
            outcomes = list(pool.map(lambda fam: _fit_or_error(sample, fam, allow_negative_s), SUB_FAMILIES))
    else:
        outcomes = [_fit_or_error(sample, fam, allow_negative_s) for fam in SUB_FAMILIES]

    fits: Dict[FamilyId, FittedModel] = {}
    errors: Dict[FamilyId, str] = {}
    for fam, (fit, error) in zip(SUB_FAMILIES, outcomes):
        if fit is not None:
            fits[fam] = fit
        else:
            errors[fam] = error

    extra = [fit.params for fit in fits.values() if not fit.degenerate]
    ref, error = _fit_or_error(sample, FamilyId.LERCH3, allow_negative_s, extra)
    if ref is not None:
        fits[FamilyId.LERCH3] = ref
    else:
        errors[FamilyId.LERCH3] = error

    records = {}
    for fam in [FamilyId.LERCH3] + SUB_FAMILIES:
        fit = fits.get(fam)
        records[fam] = CandidateRecord(
            family=fam,
            loglik=fit.loglik if fit else None,
            n_params=fam.n_params,
            converged=bool(fit and fit.converged),
            decision="failed" if fit is None else ("not converged" if not fit.converged else "not tested"),
            error=errors.get(fam),
        )

    ref_usable = ref is not None and ref.converged
    candidates: List[FittedModel] = []
    if ref_usable:
        records[FamilyId.LERCH3].decision = "reference"
        candidates.append(ref)
        for fam in SUB_FAMILIES:
            fit = fits.get(fam)
            if fit is None or not fit.converged:
                continue
            rec = records[fam]
            try:
                test = llr_test(fit, ref)
            except InconsistentFitsError as exc:
                rec.decision = "inconsistent"
                rec.error = str(exc)
                logger.warning(str(exc))
                continue
            rec.D, rec.df, rec.p_value = test.D, test.df, test.p_value
            if test.p_value < alpha:
                rec.decision = "rejected"
            else:
                rec.decision = "not rejected"
                candidates.append(fit)

    fallback = None
    if not ref_usable:
        converged = [fit for fit in fits.values() if fit.converged]
        if converged:
            fallback = "3-par Lerch fit unusable; lowest AIC among converged fits"
            candidates = [min(converged, key=lambda f: (f.aic, _PARSIMONY_ORDER.index(f.family)))]
        elif fits:
            fallback = "no fit converged; best flagged fit"
            candidates = [min(fits.values(), key=lambda f: (-f.loglik, f.n_params,
                                                            _PARSIMONY_ORDER.index(f.family)))]
        else:
            raise NonConvergenceError("every family fit failed: " + "; ".join(errors.values()))
        logger.warning(fallback)

    chosen = min(candidates, key=_rank)
    records[chosen.family].selected = True
    trace = SelectionTrace(chosen=chosen.family, alpha=alpha,
                           records=[records[fam] for fam in FamilyId], fallback=fallback)
    logger.info("selected %s (N = %d)", chosen.model.describe(), chosen.n)
    return chosen, trace

