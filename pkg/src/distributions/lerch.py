"""
Hurwitz-Lerch-Zeta family of discrete distributions on {1, 2, ...}.

    p(k) = theta^(k-1) / ((k + a)^s * Phi(theta, s, a + 1))

with the transcendent Phi(theta, s, x) = sum_{n>=0} theta^n / (n + x)^s.
Everything is computed in log space so that large s or tiny theta never
under/overflows. theta = 0 is accepted as the point mass at k = 1, the
boundary a degenerate fit lands on.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from config import get_config
from errors import InvalidArgumentError, NonConvergenceError
from samples import SpellSample, Variable
from .pmf_table import PmfTable

logger = logging.getLogger(__name__)

_MAX_BLOCK = 1 << 20


class FamilyId(Enum):
    """Members of the Lerch family, numbered as in the usual classification table"""
    LERCH3 = 1
    POLYLOG = 2
    LOGARITHMIC = 3
    GEOMETRIC = 4
    EXTENDED_LOG = 5

    @property
    def free_parameters(self) -> Tuple[str, ...]:
        return _FREE_PARAMETERS[self]

    @property
    def n_params(self) -> int:
        return len(_FREE_PARAMETERS[self])

    @property
    def fixed(self) -> Dict[str, float]:
        return _FIXED_VALUES[self]

    @property
    def label(self) -> str:
        return _LABELS[self]

    def is_nested_in(self, other: "FamilyId") -> bool:
        """True when every law of this family is also a law of other (or same family)"""
        return self is other or other in _SUPERSETS[self]

    def nests(self, other: "FamilyId") -> bool:
        """True when other is a sub-family of this one"""
        return other.is_nested_in(self)


_FREE_PARAMETERS = {
    FamilyId.LERCH3: ("theta", "s", "a"),
    FamilyId.POLYLOG: ("theta", "s"),
    FamilyId.LOGARITHMIC: ("theta",),
    FamilyId.GEOMETRIC: ("theta",),
    FamilyId.EXTENDED_LOG: ("theta", "a"),
}

_FIXED_VALUES = {
    FamilyId.LERCH3: {},
    FamilyId.POLYLOG: {"a": 0.0},
    FamilyId.LOGARITHMIC: {"s": 1.0, "a": 0.0},
    FamilyId.GEOMETRIC: {"s": 0.0, "a": 1.0},
    FamilyId.EXTENDED_LOG: {"s": 1.0},
}

# Transitive closure of the nesting order
_SUPERSETS = {
    FamilyId.LERCH3: frozenset(),
    FamilyId.POLYLOG: frozenset({FamilyId.LERCH3}),
    FamilyId.LOGARITHMIC: frozenset({FamilyId.POLYLOG, FamilyId.EXTENDED_LOG, FamilyId.LERCH3}),
    FamilyId.GEOMETRIC: frozenset({FamilyId.POLYLOG, FamilyId.LERCH3}),
    FamilyId.EXTENDED_LOG: frozenset({FamilyId.LERCH3}),
}

_LABELS = {
    FamilyId.LERCH3: "3-par Lerch",
    FamilyId.POLYLOG: "polylogarithmic",
    FamilyId.LOGARITHMIC: "logarithmic",
    FamilyId.GEOMETRIC: "geometric",
    FamilyId.EXTENDED_LOG: "extended logarithmic",
}


@dataclass(frozen=True)
class LerchParams:
    """theta in [0, 1), s real, a > -1"""

    theta: float
    s: float
    a: float

    def __post_init__(self):
        theta, s, a = float(self.theta), float(self.s), float(self.a)
        if not (math.isfinite(theta) and math.isfinite(s) and math.isfinite(a)):
            raise InvalidArgumentError(f"parameters must be finite: {self}")
        if not 0.0 <= theta < 1.0:
            raise InvalidArgumentError(f"theta must lie in [0, 1), got {theta}")
        if a <= -1.0:
            raise InvalidArgumentError(f"a must exceed -1, got {a}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "a", a)

    @property
    def degenerate(self) -> bool:
        return self.theta == 0.0

    def as_dict(self) -> Dict[str, float]:
        return {"theta": self.theta, "s": self.s, "a": self.a}


@dataclass(frozen=True)
class LerchModel:
    """A family member with its parameters; fixed fields are enforced"""

    family: FamilyId
    params: LerchParams

    def __post_init__(self):
        for name, value in self.family.fixed.items():
            if getattr(self.params, name) != value:
                raise InvalidArgumentError(
                    f"{self.family.label} requires {name} = {value}, got {getattr(self.params, name)}")

    @classmethod
    def lerch3(cls, theta: float, s: float, a: float) -> "LerchModel":
        return cls(FamilyId.LERCH3, LerchParams(theta, s, a))

    @classmethod
    def polylog(cls, theta: float, s: float) -> "LerchModel":
        return cls(FamilyId.POLYLOG, LerchParams(theta, s, 0.0))

    @classmethod
    def logarithmic(cls, theta: float) -> "LerchModel":
        return cls(FamilyId.LOGARITHMIC, LerchParams(theta, 1.0, 0.0))

    @classmethod
    def geometric(cls, theta: float) -> "LerchModel":
        """Geom(1 - theta): theta is the continuation probability"""
        return cls(FamilyId.GEOMETRIC, LerchParams(theta, 0.0, 1.0))

    @classmethod
    def extended_log(cls, theta: float, a: float) -> "LerchModel":
        return cls(FamilyId.EXTENDED_LOG, LerchParams(theta, 1.0, a))

    @classmethod
    def from_free(cls, family: FamilyId, values: Dict[str, float]) -> "LerchModel":
        merged = {**family.fixed, **values}
        return cls(family, LerchParams(merged["theta"], merged["s"], merged["a"]))

    def describe(self) -> str:
        free = ", ".join(f"{name}={getattr(self.params, name):.4g}" for name in self.family.free_parameters)
        return f"{self.family.label} ({free})"

    def pmf(self, k):
        return pmf(self.params, k)

    def log_pmf(self, k):
        return log_pmf(self.params, k)

    def cdf(self, k):
        return cdf(self.params, k)

    def survival(self, r):
        return survival(self.params, r)

    def hazard(self, r):
        return hazard(self.params, r)

    def quantile(self, q: float) -> int:
        return quantile(self.params, q)

    def mean(self) -> float:
        return moment(self.params, MomentKind.MEAN)

    def to_pmf_table(self, tail_eps: Optional[float] = None) -> PmfTable:
        return to_pmf_table(self.params, tail_eps)

    def to_dict(self) -> Dict[str, object]:
        return {"family": self.family.name, "family_id": self.family.value, **self.params.as_dict()}


class MomentKind(Enum):
    MEAN = "mean"
    LOG_SHIFTED_MEAN = "log_shifted_mean"
    INVERSE_SHIFTED_MEAN = "inverse_shifted_mean"


# =============================================================================
# TRANSCENDENT
# =============================================================================

def _check_phi_args(theta: float, x: float):
    if not (math.isfinite(theta) and math.isfinite(x)):
        raise InvalidArgumentError(f"phi arguments must be finite (theta={theta}, x={x})")
    if not 0.0 <= theta < 1.0:
        raise InvalidArgumentError(f"phi requires 0 <= theta < 1, got {theta}")
    if x <= 0.0:
        raise InvalidArgumentError(f"phi requires x > 0, got {x}")


def _log_tail_bound(log_theta: float, theta: float, s: float, x: float, n_next: float) -> Optional[float]:
    """log of an upper bound on sum_{n >= n_next} theta^n / (n + x)^s, None if not yet bounded"""
    log_first = n_next * log_theta - s * math.log(n_next + x)
    if s >= 0.0:
        return log_first - math.log1p(-theta)
    # Term ratios decrease towards theta, so the first one bounds the rest
    ratio = theta * ((n_next + 1.0 + x) / (n_next + x)) ** (-s)
    if ratio >= 1.0:
        return None
    return log_first - math.log1p(-ratio)


def log_phi(theta: float, s: float, x: float) -> float:
    """log Phi(theta, s, x) by block-wise series summation with a tail bound"""
    theta, s, x = float(theta), float(s), float(x)
    _check_phi_args(theta, x)
    if theta == 0.0:
        return -s * math.log(x)
    if s == 0.0:
        return -math.log1p(-theta)
    if s == 1.0 and x == 1.0:
        return math.log(-math.log1p(-theta) / theta)

    settings = get_config().distributions
    log_theta = math.log(theta)
    log_rel_tol = math.log(settings.PHI_REL_TOL)
    shift = None
    total = 0.0
    start = 0
    block = settings.PHI_FIRST_BLOCK
    while start < settings.PHI_MAX_TERMS:
        stop = min(start + block, settings.PHI_MAX_TERMS)
        n = np.arange(start, stop, dtype=float)
        log_terms = n * log_theta - s * np.log(n + x)
        peak = float(log_terms.max())
        if shift is None:
            shift = peak
        elif peak > shift:
            total *= math.exp(shift - peak)
            shift = peak
        total += float(np.exp(log_terms - shift).sum())

        bound = _log_tail_bound(log_theta, theta, s, x, float(stop))
        if bound is not None and bound - shift < log_rel_tol + math.log(total):
            logger.debug("phi(%g, %g, %g) converged after %d terms", theta, s, x, stop)
            return shift + math.log(total)
        start = stop
        block = min(2 * block, _MAX_BLOCK)

    partial = shift + math.log(total)
    bound = _log_tail_bound(log_theta, theta, s, x, float(start))
    raise NonConvergenceError(
        f"phi({theta}, {s}, {x}) did not converge within {settings.PHI_MAX_TERMS} terms",
        partial_sum=math.exp(min(partial, 700.0)),
        bound=math.exp(min(bound, 700.0)) if bound is not None else float("inf"),
    )


def phi(theta: float, s: float, x: float) -> float:
    """The transcendent Phi(theta, s, x) = sum_{n>=0} theta^n / (n + x)^s.

    Args:
        theta: 0 <= theta < 1
        s: any real exponent
        x: x > 0

    Raises:
        InvalidArgumentError: arguments outside the domain
        NonConvergenceError: the series did not reach the relative tolerance
            within the term cap
    """
    return math.exp(log_phi(theta, s, x))


@lru_cache(maxsize=4096)
def _log_norm(params: LerchParams) -> float:
    return log_phi(params.theta, params.s, params.a + 1.0)


def _as_support(k, name: str = "k", minimum: int = 1) -> np.ndarray:
    arr = np.asarray(k)
    if arr.size and (not np.all(np.equal(np.mod(arr, 1), 0)) or arr.min() < minimum):
        raise InvalidArgumentError(f"{name} must be integer >= {minimum}")
    return arr.astype(float)


def _scalar_or_array(out: np.ndarray, like):
    return float(out) if np.ndim(like) == 0 else out


# =============================================================================
# PMF, CDF, SURVIVAL, HAZARD
# =============================================================================

def log_pmf(params: LerchParams, k):
    """log p(k) for integer k >= 1 (scalar or array)"""
    k_arr = _as_support(k)
    if params.degenerate:
        out = np.where(k_arr == 1.0, 0.0, -np.inf)
    else:
        out = (k_arr - 1.0) * math.log(params.theta) - params.s * np.log(k_arr + params.a) - _log_norm(params)
    return _scalar_or_array(out, k)


def pmf(params: LerchParams, k):
    """p(k) = theta^(k-1) / ((k + a)^s Phi(theta, s, a + 1))"""
    return _scalar_or_array(np.exp(np.asarray(log_pmf(params, k))), k)


def _survival_scalar(params: LerchParams, r: int) -> float:
    if r == 0:
        return 1.0
    if params.degenerate:
        return 0.0
    log_s = r * math.log(params.theta) + log_phi(params.theta, params.s, params.a + r + 1.0) - _log_norm(params)
    return min(1.0, math.exp(log_s))


def survival(params: LerchParams, r):
    """P(X > r) = theta^r Phi(theta, s, a + r + 1) / Phi(theta, s, a + 1)"""
    r_arr = _as_support(r, "r", minimum=0)
    if r_arr.ndim == 0:
        return _survival_scalar(params, int(r_arr))
    return np.array([_survival_scalar(params, int(v)) for v in r_arr.reshape(-1)]).reshape(r_arr.shape)


def cdf(params: LerchParams, k):
    """P(X <= k); zero below the support"""
    k_arr = np.asarray(k)
    clipped = np.maximum(k_arr, 0)
    return _scalar_or_array(1.0 - np.asarray(survival(params, clipped)), k)


def _hazard_scalar(params: LerchParams, r: int) -> float:
    x = params.a + r
    return min(1.0, math.exp(-params.s * math.log(x) - log_phi(params.theta, params.s, x)))


def hazard(params: LerchParams, r):
    """P(X = r | X >= r) = 1 / ((a + r)^s Phi(theta, s, a + r)) for r >= 1"""
    r_arr = _as_support(r, "r")
    if r_arr.ndim == 0:
        return _hazard_scalar(params, int(r_arr))
    return np.array([_hazard_scalar(params, int(v)) for v in r_arr.reshape(-1)]).reshape(r_arr.shape)


def failure_rate(params: LerchParams, r):
    """P(X = r + 1 | X > r) for r >= 0, the forward-indexed failure rate"""
    r_arr = _as_support(r, "r", minimum=0)
    return hazard(params, r_arr.astype(np.int64) + 1) if r_arr.ndim else hazard(params, int(r_arr) + 1)


def survival_ratio(params: LerchParams, r):
    """P(X > r + 1) / P(X > r), which is 1 - failure_rate(r)"""
    out = 1.0 - np.asarray(failure_rate(params, r))
    return _scalar_or_array(out, r)


# =============================================================================
# QUANTILE AND MOMENTS
# =============================================================================

def quantile(params: LerchParams, q: float) -> int:
    """Smallest k with P(X <= k) >= q (left-continuous inverse)"""
    if not 0.0 < q < 1.0:
        raise InvalidArgumentError(f"q must lie in (0, 1), got {q}")
    settings = get_config().distributions
    cumulative = 0.0
    start = 1
    block = 256
    while start <= settings.MAX_TABLE_LENGTH:
        k = np.arange(start, start + block)
        cum = cumulative + np.cumsum(pmf(params, k))
        hit = np.flatnonzero(cum >= q - 1e-12)
        if hit.size:
            return int(k[hit[0]])
        cumulative = float(cum[-1])
        start += block
        block = min(2 * block, _MAX_BLOCK)
    raise NonConvergenceError(f"quantile {q} not reached within {settings.MAX_TABLE_LENGTH} values",
                              partial_sum=cumulative, bound=1.0 - cumulative)


def _moment_weight(kind: MomentKind, k: np.ndarray, a: float) -> np.ndarray:
    if kind is MomentKind.MEAN:
        return k
    if kind is MomentKind.LOG_SHIFTED_MEAN:
        return np.log(a + k)
    return 1.0 / (a + k)


def moment(params: LerchParams, kind: MomentKind = MomentKind.MEAN) -> float:
    """E[X], E[ln(a + X)] or E[1/(a + X)] by series summation.

    The remainder after index K is bounded through the mean series, whose term
    ratios decrease to theta; the log weight is dominated by (1 + max(a, 0)) k
    and the inverse weight by k once a + k > 1.
    """
    kind = MomentKind(kind)
    theta, s, a = params.theta, params.s, params.a
    if params.degenerate:
        return float(_moment_weight(kind, np.array([1.0]), a)[0])

    settings = get_config().distributions
    log_theta = math.log(theta)
    log_norm = _log_norm(params)
    weight_bound = (1.0 + max(a, 0.0)) if kind is MomentKind.LOG_SHIFTED_MEAN else 1.0
    total = 0.0
    scale = 0.0
    start = 1
    block = settings.PHI_FIRST_BLOCK
    while start <= settings.PHI_MAX_TERMS:
        k = np.arange(start, start + block, dtype=float)
        probs = np.exp((k - 1.0) * log_theta - s * np.log(k + a) - log_norm)
        terms = _moment_weight(kind, k, a) * probs
        total += float(terms.sum())
        scale += float(np.abs(terms).sum())

        nxt = start + block
        ratio = theta * (nxt + 1.0) / nxt * ((nxt + 1.0 + a) / (nxt + a)) ** max(-s, 0.0)
        if ratio < 1.0 and nxt + a > 1.0:
            next_mean_term = nxt * math.exp((nxt - 1.0) * log_theta - s * math.log(nxt + a) - log_norm)
            bound = weight_bound * next_mean_term / (1.0 - ratio)
            if bound <= settings.MOMENT_REL_TOL * max(scale, 1e-300):
                return total
        start = nxt
        block = min(2 * block, _MAX_BLOCK)
    raise NonConvergenceError(f"{kind.value} of {params} did not converge", partial_sum=total,
                              bound=float("nan"))


def mean(params: LerchParams) -> float:
    return moment(params, MomentKind.MEAN)


# =============================================================================
# TABULATION AND SAMPLING
# =============================================================================

def to_pmf_table(params: LerchParams, tail_eps: Optional[float] = None) -> PmfTable:
    """Tabulate p(1..K) with K the smallest index such that P(X > K) < tail_eps"""
    settings = get_config().distributions
    if tail_eps is None:
        tail_eps = settings.TABLE_TAIL_EPS
    if not 0.0 < tail_eps <= 1e-6:
        raise InvalidArgumentError(f"tail_eps must lie in (0, 1e-6], got {tail_eps}")
    if params.degenerate:
        return PmfTable(np.array([1.0]), 0.0)
    return _tabulate(params, tail_eps, settings.MAX_TABLE_LENGTH)


@lru_cache(maxsize=256)
def _tabulate(params: LerchParams, tail_eps: float, max_length: int) -> PmfTable:
    chunks = []
    cumulative = 0.0
    start = 1
    block = 256
    K = None
    while start <= max_length:
        k = np.arange(start, start + block)
        probs = np.asarray(pmf(params, k))
        cum = cumulative + np.cumsum(probs)
        chunks.append(probs)
        below = np.flatnonzero(1.0 - cum < tail_eps)
        if below.size:
            K = int(k[below[0]])
            break
        cumulative = float(cum[-1])
        start += block
        block = min(2 * block, _MAX_BLOCK)
    if K is None:
        raise NonConvergenceError(f"tail of {params} above {tail_eps} beyond {max_length} values",
                                  partial_sum=cumulative, bound=1.0 - cumulative)

    # Refine K against the survival identity rather than 1 - cumulative sum
    while _survival_scalar(params, K) >= tail_eps:
        K += 1
    while K > 1 and _survival_scalar(params, K - 1) < tail_eps:
        K -= 1
    probs = np.asarray(pmf(params, np.arange(1, K + 1)))
    table = PmfTable(probs, _survival_scalar(params, K))
    logger.debug("tabulated %s with K=%d, tail=%.3g", params, table.K, table.tail_mass)
    return table


def _tail_envelope_ratio(params: LerchParams, K: int) -> float:
    base = (K + 2.0 + params.a) / (K + 1.0 + params.a)
    return params.theta * max(1.0, base ** (-params.s))


def _draw_tail(params: LerchParams, rng: np.random.Generator, K: int, n: int) -> np.ndarray:
    """n draws from X | X > K by rejection under a geometric envelope"""
    ratio = _tail_envelope_ratio(params, K)
    while ratio >= 1.0:
        K += 1
        ratio = _tail_envelope_ratio(params, K)
    log_ratio = math.log(ratio)
    log_first = float(log_pmf(params, K + 1))
    out = np.empty(n, dtype=np.int64)
    filled = 0
    while filled < n:
        j = rng.geometric(1.0 - ratio, size=n - filled)
        log_accept = np.asarray(log_pmf(params, K + j)) - log_first - (j - 1) * log_ratio
        keep = np.log(rng.random(j.size)) < log_accept
        accepted = K + j[keep]
        out[filled:filled + accepted.size] = accepted
        filled += accepted.size
    return out


def sample_values(params: LerchParams, rng: np.random.Generator, n: int,
                  table: Optional[PmfTable] = None) -> np.ndarray:
    """n i.i.d. draws: inverse cdf on the table, tail by envelope rejection"""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if table is None:
        table = to_pmf_table(params)
    draws = table.sample(rng, n)
    in_tail = draws > table.K
    if np.any(in_tail):
        draws[in_tail] = _draw_tail(params, rng, table.K, int(in_tail.sum()))
    return draws


def sample(params: LerchParams, rng: np.random.Generator, n: int,
           variable: Variable = Variable.IT, **metadata) -> SpellSample:
    """n i.i.d. draws wrapped as a SpellSample (deterministic given rng state)"""
    return SpellSample(variable=variable, values=sample_values(params, rng, n), **metadata)
