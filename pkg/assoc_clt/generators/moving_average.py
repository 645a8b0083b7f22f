"""
Finite moving averages with nonnegative weights of i.i.d. innovations.
"""

from typing import Optional, Sequence

import numpy as np
from scipy import signal

from ..core.models import FamilySpec
from .base import BaseFamily
from .distributions import CenteredDistribution, create_distribution, normal_distribution


class MovingAverageFamily(BaseFamily):
    """X_t = sum_{k<q} w_k eps_{t-k}, with w_k >= 0."""

    def __init__(self, spec: FamilySpec, jitter: float = 1e-10):
        super().__init__(spec, jitter)
        self.weights = np.asarray(spec.params["weights"], dtype=float)
        self.dist = create_distribution(
            spec.params.get("dist", "normal"), **spec.params.get("dist_params", {})
        )
        # gamma(h) = Var(eps) * sum_k w_k w_{k+h}
        self._gamma = self.dist.variance * np.correlate(self.weights, self.weights, "full")[
            self.weights.size - 1 :
        ]

    @property
    def q(self) -> int:
        return int(self.weights.size)

    def sample_rows(self, rngs: Sequence[np.random.Generator], n: int) -> np.ndarray:
        eps = np.empty((len(rngs), n + self.q - 1))
        for i, rng in enumerate(rngs):
            eps[i] = self.dist.sample(rng, n + self.q - 1)
        return signal.lfilter(self.weights, [1.0], eps, axis=1)[:, self.q - 1 :]

    def autocovariance(self, n: int) -> np.ndarray:
        gamma = np.zeros(n)
        k = min(n, self._gamma.size)
        gamma[:k] = self._gamma[:k]
        return gamma

    def tail_sum(self, r: int) -> float:
        return float(self._gamma[max(r, 0):].sum())

    @property
    def is_gaussian(self) -> bool:
        return self.dist.is_gaussian

    def marginal(self) -> Optional[CenteredDistribution]:
        if self.dist.is_gaussian:
            return normal_distribution(float(np.sqrt(self._gamma[0])))
        return None
