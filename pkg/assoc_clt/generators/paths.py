"""
Single-path generators, one per family.

Every generator is a pure function of (parameters, n, seed).
"""

from typing import Any, Sequence

import numpy as np

from ..core.exceptions import PreconditionError
from ..core.models import FamilySpec, SamplePath
from .factory import create_family
from .monotone import MonotoneTransformFamily


def generate_path(spec: FamilySpec, n: int, seed: int, jitter: float = 1e-10) -> SamplePath:
    """Draw one path of length n from any family."""
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    family = create_family(spec, jitter=jitter)
    return SamplePath(n=n, values=family.sample(n, seed), family=spec, seed=seed)


def gen_iid(dist: str, n: int, seed: int, **dist_params: Any) -> SamplePath:
    """
    n i.i.d. draws from a registered centered distribution.

    Raises:
        UnknownComponentError: If the distribution id is not registered
    """
    params: dict = {"dist": dist}
    if dist_params:
        params["dist_params"] = dist_params
    return generate_path(FamilySpec(kind="iid", params=params), n, seed)


def gen_gaussian(autocov: Sequence[float], n: int, seed: int, jitter: float = 1e-10) -> SamplePath:
    """
    Centered Gaussian vector with Toeplitz covariance gamma(|i-j|).

    Raises:
        AssociationViolationError: If some gamma(k) < 0
        CovarianceNotPSDError: If the factorization fails beyond the jitter
    """
    spec = FamilySpec(kind="gaussian_cov", params={"gamma": [float(g) for g in autocov]})
    return generate_path(spec, n, seed, jitter=jitter)


def gen_geometric_gaussian(rho: float, n: int, seed: int, variance: float = 1.0) -> SamplePath:
    """Gaussian sequence with gamma(k) = variance * rho^k."""
    spec = FamilySpec(kind="gaussian_cov", params={"rho": rho, "variance": variance})
    return generate_path(spec, n, seed)


def gen_moving_average(
    weights: Sequence[float], n: int, seed: int, dist: str = "normal", **dist_params: Any
) -> SamplePath:
    """
    X_t = sum_k w_k eps_{t-k} with nonnegative weights.

    Raises:
        AssociationViolationError: If a weight is negative
    """
    params: dict = {"weights": [float(w) for w in weights], "dist": dist}
    if dist_params:
        params["dist_params"] = dist_params
    return generate_path(FamilySpec(kind="moving_average", params=params), n, seed)


def gen_common_factor(dist: str, n: int, seed: int, **dist_params: Any) -> SamplePath:
    """X_i = Z for every i, with Z one draw from dist."""
    params: dict = {"dist": dist}
    if dist_params:
        params["dist_params"] = dist_params
    return generate_path(FamilySpec(kind="common_factor", params=params), n, seed)


def gen_markov_two_state(
    p_stay0: float, p_stay1: float, n: int, seed: int, centered: bool = True
) -> SamplePath:
    """
    Stationary two-state chain, centered by the stationary mean when requested.

    Raises:
        AssociationViolationError: If p_stay1 < 1 - p_stay0
    """
    spec = FamilySpec(
        kind="markov_two_state",
        params={"p_stay0": p_stay0, "p_stay1": p_stay1},
        centered=centered,
    )
    return generate_path(spec, n, seed)


def gen_monotone_transform(
    path: SamplePath, map_id: str, recenter: bool = True, **map_params: Any
) -> SamplePath:
    """
    Apply a registered nondecreasing map coordinatewise to a path.

    With ``recenter`` the analytic (or Monte Carlo) mean of f(X_1) is
    subtracted. The result equals a direct draw of the transformed family
    with the same seed.

    Raises:
        UnknownComponentError: If the map id is not registered
    """
    spec = FamilySpec(
        kind="monotone_transform",
        params={
            "base": path.family.model_dump(mode="json"),
            "map": map_id,
            "map_params": map_params,
            "recenter": recenter,
        },
        centered=recenter,
    )
    family = create_family(spec)
    assert isinstance(family, MonotoneTransformFamily)
    values = family.f(np.asarray(path.values)) - family.offset
    return SamplePath(n=path.n, values=values, family=spec, seed=path.seed)
