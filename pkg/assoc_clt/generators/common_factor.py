"""
Common-factor sequences: X_i = Z for every i.

Associated (every coordinate is the same nondecreasing function of Z) but
every covariance equals Var(Z), so s_n^2 = n^2 Var(Z) and no CLT holds.
"""

import math
from typing import Optional, Sequence

import numpy as np

from ..core.models import FamilySpec
from .base import BaseFamily
from .distributions import CenteredDistribution, create_distribution


class CommonFactorFamily(BaseFamily):
    """One draw Z repeated n times."""

    def __init__(self, spec: FamilySpec, jitter: float = 1e-10):
        super().__init__(spec, jitter)
        self.dist = create_distribution(
            spec.params.get("dist", "normal"), **spec.params.get("dist_params", {})
        )

    def sample_rows(self, rngs: Sequence[np.random.Generator], n: int) -> np.ndarray:
        z = np.array([self.dist.sample(rng, 1)[0] for rng in rngs])
        return np.repeat(z[:, None], n, axis=1)

    def autocovariance(self, n: int) -> np.ndarray:
        return np.full(n, self.dist.variance)

    def tail_sum(self, r: int) -> float:
        return math.inf

    @property
    def is_gaussian(self) -> bool:
        return self.dist.is_gaussian

    def marginal(self) -> Optional[CenteredDistribution]:
        return self.dist
