"""
Independent sequences. Independent variables are associated.
"""

from typing import Optional, Sequence

import numpy as np

from ..core.models import FamilySpec
from .base import BaseFamily
from .distributions import CenteredDistribution, create_distribution


class IIDFamily(BaseFamily):
    """X_1, X_2, ... i.i.d. from a centered base distribution."""

    def __init__(self, spec: FamilySpec, jitter: float = 1e-10):
        super().__init__(spec, jitter)
        self.dist = create_distribution(
            spec.params.get("dist", "normal"), **spec.params.get("dist_params", {})
        )

    def sample_rows(self, rngs: Sequence[np.random.Generator], n: int) -> np.ndarray:
        out = np.empty((len(rngs), n))
        for i, rng in enumerate(rngs):
            out[i] = self.dist.sample(rng, n)
        return out

    def autocovariance(self, n: int) -> np.ndarray:
        gamma = np.zeros(n)
        gamma[0] = self.dist.variance
        return gamma

    def tail_sum(self, r: int) -> float:
        return self.dist.variance if r <= 0 else 0.0

    @property
    def is_gaussian(self) -> bool:
        return self.dist.is_gaussian

    def marginal(self) -> Optional[CenteredDistribution]:
        return self.dist
