"""
Stationary Gaussian sequences with nonnegative autocovariance.

Two parameterizations:
    geometric: gamma(k) = variance * rho^k, sampled through the closed-form
        triangular factor of the Toeplitz matrix (an AR(1) recursion, O(n))
    explicit: gamma given on a finite support, sampled through a dense or
        banded Cholesky factor of the Toeplitz matrix
"""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, signal

from ..core.exceptions import CovarianceNotPSDError
from ..core.models import FamilySpec
from .base import BaseFamily
from .distributions import CenteredDistribution, normal_distribution

logger = logging.getLogger(__name__)

# Explicit autocovariances whose support is below this fraction of n use the banded factor.
_BANDED_FRACTION = 0.25


def _toeplitz_factor(gamma: np.ndarray, jitter: float) -> Tuple[str, np.ndarray]:
    """Lower Cholesky factor of Toeplitz(gamma), banded when the support is short."""
    n = gamma.size
    support = int(np.flatnonzero(gamma)[-1]) + 1 if np.any(gamma) else 1
    banded = support < _BANDED_FRACTION * n

    def factor(shift: float) -> np.ndarray:
        if banded:
            ab = np.zeros((support, n))
            for d in range(support):
                ab[d, : n - d] = gamma[d]
            ab[0] += shift
            return linalg.cholesky_banded(ab, lower=True)
        mat = linalg.toeplitz(gamma)
        mat[np.diag_indices(n)] += shift
        return linalg.cholesky(mat, lower=True)

    kind = "banded" if banded else "dense"
    try:
        return kind, factor(0.0)
    except linalg.LinAlgError:
        logger.warning("Covariance factorization failed at n=%d; retrying with jitter %.1e", n, jitter)
    try:
        return kind, factor(jitter)
    except linalg.LinAlgError as e:
        raise CovarianceNotPSDError(
            f"Toeplitz covariance of length {n} is not positive semidefinite within jitter {jitter}"
        ) from e


def apply_factor(kind: str, factor: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Rows of z (shape (R, n)) mapped through a lower triangular factor L: x = L z."""
    if kind == "dense":
        return z @ factor.T
    out = np.zeros_like(z)
    n = z.shape[1]
    # factor[d, j] = L[j + d, j]
    for d in range(factor.shape[0]):
        out[:, d:] += factor[d, : n - d] * z[:, : n - d]
    return out


class GaussianFamily(BaseFamily):
    """Centered Gaussian sequence with nonnegative stationary autocovariance."""

    def __init__(self, spec: FamilySpec, jitter: float = 1e-10):
        super().__init__(spec, jitter)
        params = spec.params
        self.gamma: Optional[np.ndarray] = None
        if "gamma" in params:
            self.gamma = np.asarray(params["gamma"], dtype=float)
            self.rho = 0.0
            self._variance = float(self.gamma[0])
        else:
            self.rho = float(params.get("rho", 0.0))
            self._variance = float(params.get("variance", 1.0))
        self._factors: Dict[int, Tuple[str, np.ndarray]] = {}

    @property
    def is_geometric(self) -> bool:
        return self.gamma is None

    @property
    def is_gaussian(self) -> bool:
        return True

    @property
    def variance(self) -> float:
        return self._variance

    def prepare(self, n: int) -> None:
        if not self.is_geometric and n not in self._factors:
            self._factors[n] = _toeplitz_factor(self.autocovariance(n), self.jitter)

    def sample_rows(self, rngs: Sequence[np.random.Generator], n: int) -> np.ndarray:
        z = np.empty((len(rngs), n))
        for i, rng in enumerate(rngs):
            z[i] = rng.standard_normal(n)
        if self.is_geometric:
            innovations = z * math.sqrt(self._variance * (1.0 - self.rho**2))
            innovations[:, 0] = z[:, 0] * math.sqrt(self._variance)
            return signal.lfilter([1.0], [1.0, -self.rho], innovations, axis=1)
        self.prepare(n)
        kind, factor = self._factors[n]
        return apply_factor(kind, factor, z)

    def autocovariance(self, n: int) -> np.ndarray:
        if self.is_geometric:
            return self._variance * self.rho ** np.arange(n)
        gamma = np.zeros(n)
        k = min(n, self.gamma.size)
        gamma[:k] = self.gamma[:k]
        return gamma

    def tail_sum(self, r: int) -> float:
        r = max(r, 0)
        if self.is_geometric:
            return self._variance * self.rho**r / (1.0 - self.rho)
        return float(self.gamma[r:].sum())

    def marginal(self) -> Optional[CenteredDistribution]:
        return normal_distribution(math.sqrt(self._variance))
