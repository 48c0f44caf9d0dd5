"""
Tabulated pmf on {1, 2, ...} with an explicit tail mass.

PmfTable is the common representation of every derived distribution (chains,
DM-derived spells, IM-recovered inter-arrival times) and of a fitted Lerch
law once it has been tabulated for sampling or goodness-of-fit work.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Union

import numpy as np

from errors import InvalidArgumentError

ArrayLike = Union[int, np.ndarray, List[int]]

# Construction check. A tabulated Lerch law takes its tail from the survival
# identity, so probabilities plus tail agree with 1 only to the Phi series accuracy.
NORMALIZATION_TOLERANCE = 1e-9
# Derived laws (DM spells, IM inter-arrival, chains) carry the complement of
# their probabilities as tail and meet this tighter bound
DERIVED_NORMALIZATION_TOLERANCE = 1e-12
QUANTILE_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class PmfTable:
    """Probabilities for k = 1..K plus the mass beyond K.

    Attributes:
        probabilities: p(1), ..., p(K) (index 0 holds k = 1)
        tail_mass: P(X > K)
    """

    probabilities: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=float).reshape(-1)
        if probs.size == 0:
            raise InvalidArgumentError("a PmfTable needs at least one probability")
        if not np.all(np.isfinite(probs)) or probs.min() < -1e-15:
            raise InvalidArgumentError("probabilities must be finite and non-negative")
        tail = float(self.tail_mass)
        if not np.isfinite(tail) or tail < -1e-15:
            raise InvalidArgumentError(f"tail mass must be non-negative, got {tail}")
        probs = np.clip(probs, 0.0, None)
        tail = max(tail, 0.0)

        total = probs.sum() + tail
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise InvalidArgumentError(f"probabilities plus tail sum to {total!r}, not 1")

        # Trailing zeros carry no information
        nonzero = np.flatnonzero(probs)
        if nonzero.size and nonzero[-1] < probs.size - 1:
            probs = probs[: nonzero[-1] + 1]
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "tail_mass", tail)

    @classmethod
    def from_probabilities(cls, probabilities, tail_mass: Optional[float] = None) -> "PmfTable":
        """Build a table, taking the tail as whatever mass the probabilities leave"""
        probs = np.asarray(probabilities, dtype=float)
        if tail_mass is None:
            excess = float(probs.sum()) - 1.0
            if excess > DERIVED_NORMALIZATION_TOLERANCE:
                raise InvalidArgumentError(f"probabilities exceed 1 by {excess:.3g}")
            tail_mass = max(0.0, -excess)
        return cls(probs, tail_mass)

    @property
    def K(self) -> int:
        return int(self.probabilities.size)

    def total(self) -> float:
        return float(self.probabilities.sum() + self.tail_mass)

    def pmf(self, k: ArrayLike):
        """p(k); zero for k < 1 and for k > K (tail mass is unallocated)"""
        k_arr = np.asarray(k)
        padded = np.concatenate(([0.0], self.probabilities, [0.0]))
        idx = np.clip(k_arr, 0, self.K + 1).astype(np.int64)
        out = padded[idx]
        return float(out) if np.ndim(out) == 0 else out

    def cdf(self, k: ArrayLike):
        """P(X <= k)"""
        return _apply(lambda r: 1.0 - self._survival_scalar(r), k)

    def survival(self, r: ArrayLike):
        """P(X > r); equals the tail mass for r >= K"""
        return _apply(self._survival_scalar, r)

    def _survival_scalar(self, r: int) -> float:
        if r < 1:
            return 1.0
        if r >= self.K:
            return self.tail_mass
        return float(self._upper_sums()[r])

    def _upper_sums(self) -> np.ndarray:
        # upper[r] = P(X > r) for r = 0..K
        cached = self.__dict__.get("_upper")
        if cached is None:
            tail_sums = np.cumsum(self.probabilities[::-1])[::-1]
            cached = np.concatenate((tail_sums, [0.0])) + self.tail_mass
            object.__setattr__(self, "_upper", cached)
        return cached

    def cumulative(self) -> np.ndarray:
        """P(X <= k) for k = 1..K"""
        return np.cumsum(self.probabilities)

    def quantile(self, q: float) -> int:
        """Smallest k with P(X <= k) >= q; K + 1 when q falls in the tail"""
        if not 0.0 < q < 1.0:
            raise InvalidArgumentError(f"q must lie in (0, 1), got {q}")
        idx = int(np.searchsorted(self.cumulative(), q - QUANTILE_SLACK, side="left"))
        return idx + 1

    def mean(self) -> float:
        """E[X], with the declared tail extrapolated geometrically from p(K)"""
        k = np.arange(1, self.K + 1, dtype=float)
        body = float(np.dot(k, self.probabilities))
        tail = self.tail_mass
        if tail == 0.0:
            return body
        last = float(self.probabilities[-1])
        if last <= 0.0:
            return body + (self.K + 1) * tail
        return body + self.K * tail + tail * (last + tail) / last

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n draws by inverse cdf; draws in the tail are reported as K + 1"""
        if n < 1:
            raise InvalidArgumentError(f"n must be >= 1, got {n}")
        u = rng.random(n)
        return np.searchsorted(self.cumulative(), u, side="right").astype(np.int64) + 1

    def hazard(self, r: int) -> float:
        """P(X = r | X >= r)"""
        if r < 1:
            raise InvalidArgumentError(f"r must be >= 1, got {r}")
        at_risk = self._survival_scalar(r - 1)
        return float(self.pmf(r) / at_risk) if at_risk > 0 else float("nan")

    def to_dict(self, max_terms: Optional[int] = None) -> Dict[str, object]:
        probs = self.probabilities if max_terms is None else self.probabilities[:max_terms]
        return {
            "K": self.K,
            "tail_mass": self.tail_mass,
            "probabilities": [float(p) for p in probs],
        }


def _apply(func, values):
    arr = np.asarray(values)
    if arr.ndim == 0:
        return func(int(arr))
    return np.array([func(int(v)) for v in arr.reshape(-1)]).reshape(arr.shape)
