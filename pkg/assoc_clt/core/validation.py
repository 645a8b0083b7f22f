"""
Parameter checks for family specifications.

Violations are returned as data; ``create_family`` turns them into exceptions.
"""

from typing import Any, Dict, List

import numpy as np

from .models import FamilySpec, Violation

# Constraints whose violation breaks the sufficient condition for association.
ASSOCIATION_CONSTRAINTS = frozenset(
    {
        "nonnegative-correlation",
        "nonnegative-weights",
        "stochastic-monotonicity",
        "increasing-map",
    }
)
UNKNOWN_ID_CONSTRAINTS = frozenset({"registered-distribution", "registered-map"})

# Frequency grid for the spectral positivity check of finite-support autocovariances.
_SPECTRAL_POINTS = 4096


def _check_distribution(params: Dict[str, Any], out: List[Violation], key: str = "dist") -> None:
    from ..generators.distributions import create_distribution, list_distributions

    name = params.get(key, "normal")
    if name not in list_distributions():
        out.append(
            Violation(
                constraint="registered-distribution",
                parameter=key,
                detail=f"'{name}' is not one of {', '.join(list_distributions())}",
                value=str(name),
            )
        )
        return
    try:
        create_distribution(name, **params.get("dist_params", {}))
    except (TypeError, ValueError) as e:
        out.append(Violation(constraint="distribution-parameters", parameter="dist_params", detail=str(e)))


def _check_gaussian(params: Dict[str, Any], out: List[Violation]) -> None:
    if "gamma" in params:
        gamma = np.asarray(params["gamma"], dtype=float)
        if gamma.ndim != 1 or gamma.size == 0:
            out.append(Violation(constraint="autocovariance-shape", parameter="gamma",
                                 detail="gamma must be a non-empty vector"))
            return
        for k in np.flatnonzero(gamma < 0):
            out.append(Violation(constraint="nonnegative-correlation", parameter=f"gamma[{k}]",
                                 detail=f"gamma({k}) = {gamma[k]} < 0"))
        if gamma[0] <= 0:
            out.append(Violation(constraint="positive-variance", parameter="gamma[0]",
                                 detail="gamma(0) must be > 0"))
            return
        omega = np.linspace(0.0, np.pi, _SPECTRAL_POINTS)
        lags = np.arange(1, gamma.size)
        density = gamma[0] + 2.0 * np.cos(np.outer(omega, lags)) @ gamma[1:]
        if density.min() < -1e-10 * gamma[0]:
            out.append(Violation(constraint="positive-semidefinite", parameter="gamma",
                                 detail=f"spectral density reaches {density.min():.3g}"))
        return
    rho = float(params.get("rho", 0.0))
    variance = float(params.get("variance", 1.0))
    if rho < 0:
        out.append(Violation(constraint="nonnegative-correlation", parameter="rho",
                             detail=f"rho = {rho} < 0"))
    if rho >= 1:
        out.append(Violation(constraint="summable-autocovariance", parameter="rho",
                             detail=f"rho = {rho} must be < 1"))
    if variance <= 0:
        out.append(Violation(constraint="positive-variance", parameter="variance",
                             detail=f"variance = {variance}"))


def _check_moving_average(params: Dict[str, Any], out: List[Violation]) -> None:
    weights = np.asarray(params.get("weights", []), dtype=float)
    if weights.ndim != 1 or weights.size == 0:
        out.append(Violation(constraint="weights-shape", parameter="weights",
                             detail="weights must be a non-empty vector"))
        return
    for k in np.flatnonzero(weights < 0):
        out.append(Violation(constraint="nonnegative-weights", parameter=f"weights[{k}]",
                             detail=f"w_{k} = {weights[k]} < 0"))
    if not np.any(weights > 0):
        out.append(Violation(constraint="positive-weight", parameter="weights",
                             detail="at least one weight must be > 0"))
    _check_distribution(params, out)


def _check_markov(params: Dict[str, Any], out: List[Violation]) -> None:
    p0 = float(params.get("p_stay0", 0.5))
    p1 = float(params.get("p_stay1", 0.5))
    for name, p in (("p_stay0", p0), ("p_stay1", p1)):
        if not 0.0 <= p <= 1.0:
            out.append(Violation(constraint="probability-range", parameter=name,
                                 detail=f"{name} = {p} outside [0, 1]"))
    if p1 < 1.0 - p0:
        out.append(Violation(constraint="stochastic-monotonicity", parameter="p_stay1",
                             detail=f"p_stay1 = {p1} < 1 - p_stay0 = {1.0 - p0}"))
    if p0 == 1.0 and p1 == 1.0:
        out.append(Violation(constraint="ergodicity", parameter="p_stay0,p_stay1",
                             detail="both states absorbing"))


def _check_monotone(params: Dict[str, Any], out: List[Violation]) -> None:
    from ..generators.transforms import create_map, list_maps

    name = params.get("map", "identity")
    if name not in list_maps():
        out.append(Violation(constraint="registered-map", parameter="map",
                             detail=f"'{name}' is not one of {', '.join(list_maps())}", value=str(name)))
    else:
        try:
            create_map(name, **params.get("map_params", {}))
        except (TypeError, ValueError) as e:
            out.append(Violation(constraint="increasing-map", parameter="map_params", detail=str(e)))
    base = params.get("base")
    if base is None:
        out.append(Violation(constraint="base-family", parameter="base", detail="missing base family"))
        return
    try:
        base_spec = base if isinstance(base, FamilySpec) else FamilySpec.model_validate(base)
    except ValueError as e:
        out.append(Violation(constraint="base-family", parameter="base", detail=str(e)))
        return
    for v in validate_family(base_spec):
        out.append(v.model_copy(update={"parameter": f"base.{v.parameter}"}))


def _check_centering(spec: FamilySpec, out: List[Violation]) -> None:
    # Other kinds center by construction when the flag is set.
    if spec.centered and spec.kind == "monotone_transform" and not spec.params.get("recenter", True):
        from ..generators.factory import create_family

        try:
            mean = create_family(spec.model_copy(update={"centered": False})).mean()
        except ValueError:
            return
        if abs(mean) > 1e-10:
            out.append(Violation(constraint="centered-mean", parameter="centered",
                                 detail=f"analytic mean {mean:.6g} != 0"))


def validate_family(spec: FamilySpec) -> List[Violation]:
    """
    Check every kind-specific constraint of a family.

    Args:
        spec: Family specification

    Returns:
        List of violations; empty iff every constraint holds
    """
    violations: List[Violation] = []
    params = spec.params
    if spec.kind in ("iid", "common_factor"):
        _check_distribution(params, violations)
    elif spec.kind == "gaussian_cov":
        _check_gaussian(params, violations)
    elif spec.kind == "moving_average":
        _check_moving_average(params, violations)
    elif spec.kind == "markov_two_state":
        _check_markov(params, violations)
    elif spec.kind == "monotone_transform":
        _check_monotone(params, violations)
    if not violations:
        _check_centering(spec, violations)
    return violations
