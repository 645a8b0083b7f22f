"""
Stationary two-state Markov chains.

A homogeneous chain on {0, 1} is associated when its kernel is
stochastically monotone: P(next=1 | cur=1) >= P(next=1 | cur=0), that is
p_stay1 >= 1 - p_stay0. Paths start from the stationary law.
"""

from typing import Optional, Sequence

import numpy as np
from scipy import stats

from ..core.models import FamilySpec
from .base import BaseFamily
from .distributions import CenteredDistribution


class MarkovTwoStateFamily(BaseFamily):
    """Two-state chain with stay probabilities (p_stay0, p_stay1)."""

    def __init__(self, spec: FamilySpec, jitter: float = 1e-10):
        super().__init__(spec, jitter)
        self.p_stay0 = float(spec.params.get("p_stay0", 0.5))
        self.p_stay1 = float(spec.params.get("p_stay1", 0.5))
        leave0, leave1 = 1.0 - self.p_stay0, 1.0 - self.p_stay1
        # Stationary probability of state 1.
        self.pi1 = leave0 / (leave0 + leave1)
        # Second eigenvalue of the transition matrix; gamma(h) = Var * lam^h.
        self.lam = self.p_stay0 + self.p_stay1 - 1.0
        self.offset = self.pi1 if spec.centered else 0.0

    @property
    def variance(self) -> float:
        return self.pi1 * (1.0 - self.pi1)

    def mean(self) -> float:
        return self.pi1 - self.offset

    def sample_rows(self, rngs: Sequence[np.random.Generator], n: int) -> np.ndarray:
        u = np.empty((len(rngs), n))
        for i, rng in enumerate(rngs):
            u[i] = rng.random(n)
        states = np.empty((len(rngs), n))
        current = u[:, 0] < self.pi1
        states[:, 0] = current
        up_from0 = 1.0 - self.p_stay0
        for t in range(1, n):
            current = np.where(current, u[:, t] < self.p_stay1, u[:, t] < up_from0)
            states[:, t] = current
        return states - self.offset

    def autocovariance(self, n: int) -> np.ndarray:
        return self.variance * self.lam ** np.arange(n)

    def tail_sum(self, r: int) -> float:
        return self.variance * self.lam ** max(r, 0) / (1.0 - self.lam)

    def marginal(self) -> Optional[CenteredDistribution]:
        law = stats.rv_discrete(name="two_point", values=([0, 1], [1.0 - self.pi1, self.pi1]))
        return CenteredDistribution("two_point", law(loc=-self.pi1), {"pi1": self.pi1})
