"""
Base class for associated families.

All families must inherit from BaseFamily and implement ``sample_rows``,
``autocovariance`` and ``tail_sum``.
"""

import math
from abc import ABC, abstractmethod
from typing import Optional, Sequence

import numpy as np

from ..core.exceptions import UnknownAnalyticError
from ..core.models import FamilySpec, LongRunVariance
from .distributions import CenteredDistribution
from .rng import generator_from_seed


class BaseFamily(ABC):
    """
    Abstract base class for all families of associated sequences.

    A family is a stationary generative law with known analytic structure.
    Sampling is row-wise: row i of ``sample_rows`` consumes only ``rngs[i]``,
    so a path never depends on the batch it was generated in.
    """

    def __init__(self, spec: FamilySpec, jitter: float = 1e-10):
        """
        Initialize the family.

        Args:
            spec: Validated family specification
            jitter: Largest diagonal jitter allowed when factorizing covariances
        """
        self.spec = spec
        self.jitter = jitter

    @abstractmethod
    def sample_rows(self, rngs: Sequence[np.random.Generator], n: int) -> np.ndarray:
        """
        Draw one path per generator.

        Args:
            rngs: One generator per row
            n: Path length

        Returns:
            Array of shape (len(rngs), n)
        """

    @abstractmethod
    def autocovariance(self, n: int) -> np.ndarray:
        """Stationary autocovariance gamma(0..n-1)."""

    @abstractmethod
    def tail_sum(self, r: int) -> float:
        """sum_{k >= r} gamma(k) over the infinite sequence (inf when divergent)."""

    def prepare(self, n: int) -> None:
        """Precompute anything sampling at length n needs (before threads share the family)."""

    def sample(self, n: int, seed: int) -> np.ndarray:
        """One path of length n drawn from the stream keyed by ``seed``."""
        return self.sample_rows([generator_from_seed(seed)], n)[0]

    def mean(self) -> float:
        """Analytic mean of X_1."""
        return 0.0

    @property
    def is_gaussian(self) -> bool:
        return False

    @property
    def variance(self) -> float:
        return float(self.autocovariance(1)[0])

    def marginal(self) -> Optional[CenteredDistribution]:
        """Law of X_1 - E X_1, when known."""
        return None

    def long_run_variance(self) -> LongRunVariance:
        tail = self.tail_sum(1)
        if not math.isfinite(tail):
            return LongRunVariance(sigma2=math.inf, finite=False, method="divergent")
        return LongRunVariance(sigma2=self.variance + 2.0 * tail, finite=True, method="closed_form")

    def cox_limit(self, r: int) -> float:
        """Infinite-window Cox coefficient u(r) = sup_j sum_{|i-j| >= r} Cov(X_i, X_j)."""
        if r <= 0:
            return self.variance + 2.0 * self.tail_sum(1)
        return 2.0 * self.tail_sum(r)

    def abs_moment(self, p: float) -> float:
        """E|X_1 - E X_1|^p."""
        marginal = self.marginal()
        if marginal is None:
            raise UnknownAnalyticError(f"no marginal law for {self.spec.kind}")
        return marginal.abs_moment(p)

    def truncated_second_moment(self, a: float) -> float:
        """E[(X_1 - E X_1)^2 1{|X_1 - E X_1| >= a}]."""
        marginal = self.marginal()
        if marginal is None:
            raise UnknownAnalyticError(f"no marginal law for {self.spec.kind}")
        return marginal.truncated_second_moment(a)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.spec.label()})"
