"""
Factory for creating families from FamilySpec values.
"""

from typing import Dict, List, Type

from ..core.exceptions import (
    AssociationViolationError,
    PreconditionError,
    UnknownComponentError,
)
from ..core.models import FamilySpec
from ..core.validation import (
    ASSOCIATION_CONSTRAINTS,
    UNKNOWN_ID_CONSTRAINTS,
    validate_family,
)
from .base import BaseFamily
from .common_factor import CommonFactorFamily
from .distributions import list_distributions
from .gaussian import GaussianFamily
from .iid import IIDFamily
from .markov import MarkovTwoStateFamily
from .monotone import MonotoneTransformFamily
from .moving_average import MovingAverageFamily
from .transforms import list_maps

# Registry of family classes
_FAMILY_REGISTRY: Dict[str, Type[BaseFamily]] = {
    "iid": IIDFamily,
    "gaussian_cov": GaussianFamily,
    "moving_average": MovingAverageFamily,
    "common_factor": CommonFactorFamily,
    "markov_two_state": MarkovTwoStateFamily,
    "monotone_transform": MonotoneTransformFamily,
}


def register_family(kind: str, family_class: Type[BaseFamily]) -> None:
    """
    Register a family class under a kind name.

    Raises:
        TypeError: If family_class is not a subclass of BaseFamily
    """
    if not issubclass(family_class, BaseFamily):
        raise TypeError(
            f"Family class must inherit from BaseFamily, got {family_class.__name__}"
        )
    _FAMILY_REGISTRY[kind.lower()] = family_class


def create_family(spec: FamilySpec, jitter: float = 1e-10) -> BaseFamily:
    """
    Create a family from its FamilySpec.

    Args:
        spec: Family specification
        jitter: Largest diagonal jitter for covariance factorizations

    Returns:
        Initialized family

    Raises:
        UnknownComponentError: Unknown kind, distribution or map id
        AssociationViolationError: Parameters break the association condition
        PreconditionError: Any other parameter violation
    """
    if spec.kind not in _FAMILY_REGISTRY:
        raise UnknownComponentError("family", spec.kind, list(_FAMILY_REGISTRY))

    violations = validate_family(spec)
    if violations:
        message = "; ".join(f"{v.constraint} ({v.parameter}): {v.detail}" for v in violations)
        constraints = {v.constraint for v in violations}
        unknown = [v for v in violations if v.constraint in UNKNOWN_ID_CONSTRAINTS]
        if unknown:
            v = unknown[0]
            if v.constraint == "registered-distribution":
                raise UnknownComponentError("distribution", v.value or "?", list_distributions())
            raise UnknownComponentError("map", v.value or "?", list_maps())
        if constraints & ASSOCIATION_CONSTRAINTS:
            raise AssociationViolationError(message)
        raise PreconditionError(message)

    return _FAMILY_REGISTRY[spec.kind](spec, jitter=jitter)


def list_families() -> List[str]:
    """List all registered family kinds."""
    return sorted(_FAMILY_REGISTRY)
