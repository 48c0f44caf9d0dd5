"""
Maximum likelihood fitting of the Lerch family members.

The optimizer works on transformed coordinates (logit theta, log s or s,
log(1 + a)) with box bounds, numerically differenced gradients and several
starts: a moment-based start plus jittered variants drawn from a fixed seed.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit

from config import get_config
from errors import InsufficientDataError, InvalidArgumentError, NonConvergenceError, NumericalDegeneracyError
from samples import SpellSample
from distributions import FamilyId, LerchModel, LerchParams, log_phi

logger = logging.getLogger(__name__)

ParamsLike = Union[LerchParams, LerchModel]
SampleLike = Union[SpellSample, Sequence[int], np.ndarray]


@dataclass(frozen=True)
class FittedModel:
    """A fitted family member with its log-likelihood and fit diagnostics"""

    model: LerchModel
    loglik: float
    n: int
    converged: bool
    sample_moments: Dict[str, float]
    degenerate: bool = False
    gradient_norm: float = 0.0
    n_starts: int = 1
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def family(self) -> FamilyId:
        return self.model.family

    @property
    def params(self) -> LerchParams:
        return self.model.params

    @property
    def n_params(self) -> int:
        return self.family.n_params

    @property
    def aic(self) -> float:
        return 2.0 * self.n_params - 2.0 * self.loglik

    def to_dict(self) -> Dict[str, object]:
        return {
            **self.model.to_dict(),
            "loglik": self.loglik,
            "n": self.n,
            "converged": self.converged,
            "degenerate": self.degenerate,
            "sample_moments": dict(self.sample_moments),
            "warnings": list(self.warnings),
        }


def _values_of(sample: SampleLike) -> np.ndarray:
    values = sample.values if isinstance(sample, SpellSample) else np.asarray(sample, dtype=np.int64)
    values = np.asarray(values, dtype=np.int64).reshape(-1)
    if values.size == 0:
        raise InsufficientDataError("cannot evaluate a likelihood on an empty sample")
    if values.min() < 1:
        raise InvalidArgumentError("durations must be >= 1")
    return values


def _params_of(params: ParamsLike) -> LerchParams:
    return params.params if isinstance(params, LerchModel) else params


class _Counts:
    """Sufficient summary of a sample: distinct values and their counts"""

    def __init__(self, values: np.ndarray):
        uniq, counts = np.unique(values, return_counts=True)
        self.values = uniq.astype(float)
        self.counts = counts.astype(float)
        self.n = int(values.size)
        self.sum_minus_one = float(np.dot(self.counts, self.values - 1.0))

    def loglik(self, theta: float, s: float, a: float) -> float:
        if theta == 0.0:
            return 0.0 if self.sum_minus_one == 0.0 else -math.inf
        shifted = float(np.dot(self.counts, np.log(self.values + a))) if s != 0.0 else 0.0
        return self.sum_minus_one * math.log(theta) - s * shifted - self.n * log_phi(theta, s, a + 1.0)


def log_likelihood(params: ParamsLike, sample: SampleLike) -> float:
    """Sum over the sample of (v - 1) ln theta - s ln(v + a) - ln Phi(theta, s, a + 1)"""
    p = _params_of(params)
    return _Counts(_values_of(sample)).loglik(p.theta, p.s, p.a)


def sample_moments(values: np.ndarray, a: float) -> Dict[str, float]:
    """Sample counterparts of the moment conditions at shift a"""
    v = values.astype(float)
    return {
        "mean": float(v.mean()),
        "log_shifted_mean": float(np.log(a + v).mean()),
        "inverse_shifted_mean": float((1.0 / (a + v)).mean()),
    }


class _Transform:
    """Map between the free natural parameters of a family and optimizer coordinates"""

    def __init__(self, family: FamilyId, allow_negative_s: bool):
        settings = get_config().inference
        self.family = family
        self.names = family.free_parameters
        self.log_s = not allow_negative_s
        bounds = {
            "theta": settings.LOGIT_THETA_BOUNDS,
            "s": settings.LOG_S_BOUNDS if self.log_s else settings.FREE_S_BOUNDS,
            "a": settings.LOG_SHIFT_BOUNDS,
        }
        self.bounds = [bounds[name] for name in self.names]

    def natural(self, u: np.ndarray) -> Dict[str, float]:
        out = dict(self.family.fixed)
        for name, value in zip(self.names, u):
            if name == "theta":
                out["theta"] = float(expit(value))
            elif name == "s":
                out["s"] = float(math.exp(value)) if self.log_s else float(value)
            else:
                out["a"] = float(math.expm1(value))
        return out

    def internal(self, theta: float, s: float, a: float) -> np.ndarray:
        coords = []
        for name in self.names:
            if name == "theta":
                coords.append(float(logit(min(max(theta, 1e-12), 1.0 - 1e-12))))
            elif name == "s":
                coords.append(math.log(max(s, 1e-300)) if self.log_s else s)
            else:
                coords.append(math.log1p(a))
        return self.clip(np.array(coords, dtype=float))

    def clip(self, u: np.ndarray) -> np.ndarray:
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return np.clip(u, lo, hi)

    def jacobian_diagonal(self, u: np.ndarray) -> np.ndarray:
        """d(natural)/d(internal) per free parameter"""
        nat = self.natural(u)
        out = []
        for name in self.names:
            if name == "theta":
                out.append(nat["theta"] * (1.0 - nat["theta"]))
            elif name == "s":
                out.append(nat["s"] if self.log_s else 1.0)
            else:
                out.append(1.0 + nat["a"])
        return np.array(out)


class _Objective:
    """Mean negative log-likelihood over optimizer coordinates"""

    def __init__(self, counts: _Counts, transform: _Transform):
        self.counts = counts
        self.transform = transform
        self.step = get_config().inference.GRADIENT_STEP

    def __call__(self, u: np.ndarray) -> float:
        nat = self.transform.natural(u)
        try:
            value = -self.counts.loglik(nat["theta"], nat["s"], nat["a"]) / self.counts.n
        except (NonConvergenceError, InvalidArgumentError, OverflowError, ValueError):
            return 1e10
        return value if math.isfinite(value) else 1e10

    def gradient(self, u: np.ndarray) -> np.ndarray:
        grad = np.zeros_like(u)
        for i in range(u.size):
            e = np.zeros_like(u)
            e[i] = self.step
            grad[i] = (self(u + e) - self(u - e)) / (2.0 * self.step)
        return grad

    def projected_gradient_norm(self, u: np.ndarray) -> float:
        """Gradient norm with components pushing against an active bound removed"""
        grad = self.gradient(u)
        for i, (lo, hi) in enumerate(self.transform.bounds):
            if (u[i] <= lo + 1e-9 and grad[i] > 0) or (u[i] >= hi - 1e-9 and grad[i] < 0):
                grad[i] = 0.0
        return float(np.linalg.norm(grad))


def _moment_start(values: np.ndarray, family: FamilyId) -> Tuple[float, float, float]:
    m = float(values.mean())
    theta = min(max((m - 1.0) / m, 0.01), 0.99)
    fixed = family.fixed
    return theta, fixed.get("s", 0.5), fixed.get("a", 0.0)


def _degenerate_fit(family: FamilyId, values: np.ndarray) -> FittedModel:
    fixed = family.fixed
    model = LerchModel.from_free(family, {"theta": 0.0, "s": fixed.get("s", 0.0), "a": fixed.get("a", 0.0)})
    message = f"all {values.size} durations equal 1; {family.label} fit sits at theta = 0"
    logger.warning(message)
    return FittedModel(model=model, loglik=0.0, n=int(values.size), converged=False,
                       sample_moments=sample_moments(values, model.params.a), degenerate=True,
                       warnings=(message,))


def _check_size(values: np.ndarray) -> List[str]:
    settings = get_config().inference
    if values.size < settings.MIN_SAMPLE_SIZE:
        raise InsufficientDataError(
            f"fitting needs at least {settings.MIN_SAMPLE_SIZE} durations, got {values.size}")
    notes = []
    if values.size < settings.SMALL_SAMPLE_WARNING:
        notes.append(f"small sample (N = {values.size}); estimates are unreliable")
        logger.warning(notes[-1])
    return notes


def fit_mle(sample: SampleLike, family: FamilyId, allow_negative_s: Optional[bool] = None,
            extra_starts: Sequence[LerchParams] = ()) -> FittedModel:
    """Maximum likelihood fit of one family member.

    Args:
        sample: durations (SpellSample or integer array), N >= 10
        family: the family member to fit
        allow_negative_s: relax the s >= 0 constraint (defaults to the config)
        extra_starts: additional starting points, e.g. sub-family optima

    Returns:
        FittedModel; ``converged`` is False when no start reached the gradient
        tolerance, in which case the best parameters found are returned.

    Raises:
        InsufficientDataError: fewer than the minimum number of durations
    """
    settings = get_config().inference
    values = _values_of(sample)
    notes = _check_size(values)
    if allow_negative_s is None:
        allow_negative_s = settings.ALLOW_NEGATIVE_S

    if np.all(values == 1):
        return _degenerate_fit(family, values)

    counts = _Counts(values)

    if family is FamilyId.GEOMETRIC:
        m = float(values.mean())
        model = LerchModel.geometric((m - 1.0) / m)
        return FittedModel(model=model, loglik=counts.loglik(model.params.theta, 0.0, 1.0), n=counts.n,
                           converged=True, sample_moments=sample_moments(values, 1.0),
                           warnings=tuple(notes))

    transform = _Transform(family, allow_negative_s)
    objective = _Objective(counts, transform)

    starts = [transform.internal(*_moment_start(values, family))]
    rng = np.random.default_rng(np.random.SeedSequence([settings.START_SEED, family.value]))
    for _ in range(settings.N_STARTS - 1):
        starts.append(transform.clip(starts[0] + rng.normal(0.0, settings.START_JITTER, size=starts[0].size)))
    for params in extra_starts:
        starts.append(transform.internal(params.theta, params.s, params.a))

    best_u, best_value = None, math.inf
    for i, u0 in enumerate(starts):
        result = minimize(objective, u0, jac=objective.gradient, method="L-BFGS-B",
                          bounds=transform.bounds,
                          options={"maxiter": settings.MAX_ITERATIONS, "ftol": 1e-15, "gtol": 1e-10})
        logger.debug("%s start %d: nll=%.10g (%s)", family.name, i, result.fun, result.message)
        if result.fun < best_value:
            best_u, best_value = np.asarray(result.x, dtype=float), float(result.fun)

    if best_u is None or best_value >= 1e10:
        raise NonConvergenceError(f"no start produced a finite likelihood for {family.label}",
                                  partial_sum=best_value, bound=float("nan"))

    grad_norm = objective.projected_gradient_norm(best_u)
    converged = grad_norm < settings.GRADIENT_TOL
    if not converged:
        notes.append(f"{family.label} fit did not converge (gradient norm {grad_norm:.2e})")
        logger.warning(notes[-1])

    model = LerchModel.from_free(family, transform.natural(best_u))
    p = model.params
    return FittedModel(model=model, loglik=counts.loglik(p.theta, p.s, p.a),
                       n=counts.n, converged=converged,
                       sample_moments=sample_moments(values, model.params.a),
                       gradient_norm=grad_norm, n_starts=len(starts), warnings=tuple(notes))


def standard_errors(fit: FittedModel, sample: SampleLike,
                    allow_negative_s: Optional[bool] = None) -> Dict[str, float]:
    """Standard errors of the free parameters from the observed information.

    The Hessian of the negative log-likelihood is taken by central differences
    in optimizer coordinates and mapped back with the delta method.
    """
    settings = get_config().inference
    if allow_negative_s is None:
        allow_negative_s = settings.ALLOW_NEGATIVE_S
    if fit.degenerate:
        raise NumericalDegeneracyError("standard errors are undefined for a degenerate fit")

    counts = _Counts(_values_of(sample))
    transform = _Transform(fit.family, allow_negative_s)
    p = fit.params
    u = transform.internal(p.theta, p.s, p.a)
    h = settings.HESSIAN_STEP

    def nll(x):
        nat = transform.natural(x)
        return -counts.loglik(nat["theta"], nat["s"], nat["a"])

    d = u.size
    hessian = np.zeros((d, d))
    f0 = nll(u)
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h
        hessian[i, i] = (nll(u + ei) - 2.0 * f0 + nll(u - ei)) / h ** 2
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = h
            value = (nll(u + ei + ej) - nll(u + ei - ej) - nll(u - ei + ej) + nll(u - ei - ej)) / (4.0 * h ** 2)
            hessian[i, j] = hessian[j, i] = value

    try:
        covariance = np.linalg.inv(hessian)
    except np.linalg.LinAlgError as exc:
        raise NumericalDegeneracyError(f"singular observed information for {fit.family.label}") from exc

    variances = np.diag(covariance)
    if np.any(variances <= 0):
        logger.warning("observed information of %s is not positive definite", fit.family.label)
    scale = transform.jacobian_diagonal(u)
    se = np.where(variances > 0, np.abs(scale) * np.sqrt(np.abs(variances)), np.nan)
    return {name: float(value) for name, value in zip(transform.names, se)}
