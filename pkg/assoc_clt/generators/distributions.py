"""
Centered base distributions.

Each entry wraps a frozen scipy distribution whose mean is zero. Moments
and truncated moments come from the distribution object, with closed forms
where scipy's quadrature would lose precision.
"""

import math
from typing import Any, Callable, Dict, List

import numpy as np
from scipy import special, stats

from ..core.exceptions import UnknownComponentError


def gaussian_abs_moment(p: float) -> float:
    """E|Z|^p for Z ~ N(0, 1)."""
    return 2.0 ** (p / 2.0) * special.gamma((p + 1.0) / 2.0) / math.sqrt(math.pi)


def gaussian_truncated_second_moment(a: float, variance: float) -> float:
    """E[B^2 1{|B| >= a}] for B ~ N(0, variance)."""
    if variance <= 0:
        return 0.0
    tau = math.sqrt(variance)
    c = a / tau
    return variance * (2.0 * special.ndtr(-c) + 2.0 * c * stats.norm.pdf(c))


class CenteredDistribution:
    """A mean-zero scalar law with its moments."""

    def __init__(self, name: str, frozen: Any, params: Dict[str, float], sd: float = 1.0):
        self.name = name
        self.frozen = frozen
        self.params = params
        # Standard deviation, used by the Gaussian closed forms.
        self.sd = sd

    @property
    def is_gaussian(self) -> bool:
        return self.name == "normal"

    @property
    def variance(self) -> float:
        return float(self.frozen.var())

    def sample(self, rng: np.random.Generator, size: Any) -> np.ndarray:
        return np.asarray(self.frozen.rvs(size=size, random_state=rng), dtype=float)

    def cdf(self, x: Any) -> Any:
        return self.frozen.cdf(x)

    def expect(self, func: Callable[[Any], Any]) -> float:
        return float(self.frozen.expect(func))

    def abs_moment(self, p: float) -> float:
        """E|X|^p."""
        if self.is_gaussian:
            return self.sd**p * gaussian_abs_moment(p)
        return float(self.frozen.expect(lambda x: np.abs(x) ** p))

    def truncated_second_moment(self, a: float) -> float:
        """E[X^2 1{|X| >= a}]."""
        if a <= 0:
            return self.variance
        if self.is_gaussian:
            return gaussian_truncated_second_moment(a, self.sd**2)
        upper = self.frozen.expect(lambda x: x**2, lb=a)
        lower = self.frozen.expect(lambda x: x**2, ub=-a)
        return float(upper + lower)

    def describe(self) -> Dict[str, Any]:
        return {"dist": self.name, **self.params}


def normal_distribution(sd: float = 1.0) -> CenteredDistribution:
    """N(0, sd^2)."""
    if sd <= 0:
        raise ValueError(f"sd must be > 0, got {sd}")
    params = {} if sd == 1.0 else {"sd": sd}
    return CenteredDistribution("normal", stats.norm(scale=sd), params, sd=sd)


def _centered_exponential(rate: float = 1.0) -> CenteredDistribution:
    if rate <= 0:
        raise ValueError(f"rate must be > 0, got {rate}")
    return CenteredDistribution(
        "centered_exponential", stats.expon(loc=-1.0 / rate, scale=1.0 / rate), {"rate": rate}
    )


def _centered_uniform(half_width: float = 1.0) -> CenteredDistribution:
    if half_width <= 0:
        raise ValueError(f"half_width must be > 0, got {half_width}")
    return CenteredDistribution(
        "centered_uniform",
        stats.uniform(loc=-half_width, scale=2.0 * half_width),
        {"half_width": half_width},
    )


def _rademacher() -> CenteredDistribution:
    law = stats.rv_discrete(name="rademacher", values=([-1, 1], [0.5, 0.5]))
    return CenteredDistribution("rademacher", law, {})


# Registry of distribution constructors
_DISTRIBUTION_REGISTRY: Dict[str, Callable[..., CenteredDistribution]] = {
    "normal": normal_distribution,
    "centered_exponential": _centered_exponential,
    "centered_uniform": _centered_uniform,
    "rademacher": _rademacher,
}


def register_distribution(name: str, factory: Callable[..., CenteredDistribution]) -> None:
    """Register a constructor for a centered distribution."""
    _DISTRIBUTION_REGISTRY[name.lower()] = factory


def create_distribution(name: str, **params: Any) -> CenteredDistribution:
    """
    Create a registered distribution.

    Raises:
        UnknownComponentError: If the name is not registered
        ValueError: On invalid parameters
    """
    key = name.lower()
    if key not in _DISTRIBUTION_REGISTRY:
        raise UnknownComponentError("distribution", name, list(_DISTRIBUTION_REGISTRY))
    return _DISTRIBUTION_REGISTRY[key](**params)


def list_distributions() -> List[str]:
    return sorted(_DISTRIBUTION_REGISTRY)
