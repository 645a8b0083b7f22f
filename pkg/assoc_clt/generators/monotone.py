"""
Coordinatewise nondecreasing transforms of an associated base family.

Nondecreasing functions of associated variables are associated; affine maps
with positive slope scale the base covariance exactly. Over Gaussian bases
the autocovariance of f(X) is computed by bivariate Gauss-Hermite quadrature,
once per distinct correlation value.
"""

import logging
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import hermite_e
from scipy import stats

from ..core.exceptions import UnknownAnalyticError
from ..core.models import FamilySpec, LongRunVariance
from .base import BaseFamily
from .distributions import CenteredDistribution, normal_distribution
from .rng import derive_seed, generator_from_seed
from .transforms import MonotoneMap, create_map

logger = logging.getLogger(__name__)

_QUAD_DEGREE = 80
_QUAD_CHUNK = 256
# Lags whose base covariance bound falls below this (relative) level are treated as zero.
_NEGLIGIBLE = 1e-14
_MC_ROWS = 64
_MC_LENGTH = 16384


class MonotoneTransformFamily(BaseFamily):
    """Y_i = f(X_i) - offset for a registered nondecreasing map f."""

    def __init__(self, spec: FamilySpec, jitter: float = 1e-10):
        super().__init__(spec, jitter)
        from .factory import create_family

        params = spec.params
        self.base = create_family(FamilySpec.model_validate(params["base"]), jitter=jitter)
        self.f: MonotoneMap = create_map(params.get("map", "identity"), **params.get("map_params", {}))
        self.recenter = bool(params.get("recenter", True))
        self._nodes, self._weights = hermite_e.hermegauss(_QUAD_DEGREE)
        self._weights = self._weights / math.sqrt(2.0 * math.pi)
        self.raw_mean = self._raw_mean()
        self.offset = self.raw_mean if self.recenter else 0.0

    @property
    def is_gaussian(self) -> bool:
        return self.f.is_affine and self.base.is_gaussian

    @property
    def _quadrature(self) -> bool:
        return not self.f.is_affine and self.base.is_gaussian

    def _raw_mean(self) -> float:
        """E f(X_1)."""
        if self.f.is_affine:
            return self.f.slope * self.base.mean() + self.f.intercept  # type: ignore[operator]
        if self.base.is_gaussian:
            sd = math.sqrt(self.base.variance)
            return float(self._weights @ self.f(sd * self._nodes))
        marginal = self.base.marginal()
        if marginal is not None:
            shift = self.base.mean()
            return marginal.expect(lambda x: self.f(x + shift))
        # No closed marginal: Monte Carlo over a fixed family-keyed stream.
        master = int(self.spec.family_hash(), 16)
        rngs = [generator_from_seed(derive_seed(master, i)) for i in range(_MC_ROWS)]
        mean = float(np.mean(self.f(self.base.sample_rows(rngs, _MC_LENGTH))))
        logger.info("Monte Carlo mean of %s: %.6g", self.spec.label(), mean)
        return mean

    def mean(self) -> float:
        return self.raw_mean - self.offset

    def prepare(self, n: int) -> None:
        self.base.prepare(n)

    def sample_rows(self, rngs: Sequence[np.random.Generator], n: int) -> np.ndarray:
        return self.f(self.base.sample_rows(rngs, n)) - self.offset

    def _gaussian_covariances(self, correlations: np.ndarray) -> np.ndarray:
        """Cov(f(X), f(X')) for standardized correlations c, X, X' ~ N(0, var)."""
        sd = math.sqrt(self.base.variance)
        x, w = self._nodes, self._weights
        fx = self.f(sd * x)
        out = np.empty(correlations.size)
        for start in range(0, correlations.size, _QUAD_CHUNK):
            c = correlations[start : start + _QUAD_CHUNK][:, None, None]
            s = np.sqrt(np.clip(1.0 - c**2, 0.0, None))
            inner = self.f(sd * (c * x[None, :, None] + s * x[None, None, :]))
            joint = np.einsum("i,j,kij->k", w * fx, w, inner)
            out[start : start + _QUAD_CHUNK] = joint - self.raw_mean**2
        return out

    def autocovariance(self, n: int) -> np.ndarray:
        base_gamma = self.base.autocovariance(n)
        if self.f.is_affine:
            return self.f.slope**2 * base_gamma  # type: ignore[operator]
        if not self._quadrature:
            raise UnknownAnalyticError(
                f"no closed-form autocovariance for map '{self.f.name}' over {self.base.spec.kind}"
            )
        gamma = np.zeros(n)
        bound = self.f.sup_derivative**2 * base_gamma
        active = bound >= _NEGLIGIBLE * max(bound[0], 1e-300)
        active[0] = True
        corr = base_gamma[active] / base_gamma[0]
        unique, inverse = np.unique(corr, return_inverse=True)
        gamma[active] = self._gaussian_covariances(unique)[inverse]
        return gamma

    def _partial_sum(self, r: int) -> Tuple[float, int, float]:
        """sum_{k>=r} gamma(k) by partial sums, with Newman's bound on the remainder."""
        scale = self.f.sup_derivative**2
        terms = max(64, 2 * r)
        while True:
            remainder = scale * self.base.tail_sum(terms)
            if not math.isfinite(remainder):
                return math.inf, terms, math.inf
            if remainder < self.jitter or terms >= 2**20:
                gamma = self.autocovariance(terms)
                return float(gamma[r:].sum()), terms, remainder
            terms *= 2

    def tail_sum(self, r: int) -> float:
        if self.f.is_affine:
            return self.f.slope**2 * self.base.tail_sum(r)  # type: ignore[operator]
        if not self._quadrature:
            raise UnknownAnalyticError(f"no closed-form tail sum for map '{self.f.name}'")
        return self._partial_sum(max(r, 0))[0]

    def long_run_variance(self) -> LongRunVariance:
        if self.f.is_affine:
            return super().long_run_variance()
        if not self._quadrature:
            raise UnknownAnalyticError(f"no closed-form long-run variance for map '{self.f.name}'")
        tail, terms, remainder = self._partial_sum(1)
        if not math.isfinite(tail):
            return LongRunVariance(sigma2=math.inf, finite=False, method="divergent")
        return LongRunVariance(
            sigma2=self.variance + 2.0 * tail,
            finite=True,
            method="partial_sum",
            terms=terms,
            remainder_bound=2.0 * remainder,
        )

    def marginal(self) -> Optional[CenteredDistribution]:
        if self.is_gaussian:
            return normal_distribution(self.f.slope * math.sqrt(self.base.variance))  # type: ignore[operator]
        return None

    def _centered_expect(self, func: Callable[[np.ndarray], np.ndarray]) -> float:
        """E func(f(X_1) - E f(X_1)) over a Gaussian base."""
        base_law = stats.norm(scale=math.sqrt(self.base.variance))
        return float(base_law.expect(lambda x: func(self.f(x) - self.raw_mean)))

    def abs_moment(self, p: float) -> float:
        if self.is_gaussian or not self._quadrature:
            return super().abs_moment(p)
        return self._centered_expect(lambda y: np.abs(y) ** p)

    def truncated_second_moment(self, a: float) -> float:
        if self.is_gaussian or not self._quadrature:
            return super().truncated_second_moment(a)
        return self._centered_expect(lambda y: np.where(np.abs(y) >= a, y**2, 0.0))
