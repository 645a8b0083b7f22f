"""
Registry of nondecreasing scalar maps.

Every map records a sup-derivative bound, used by the covariance
inequalities for functions of associated variables.
"""

from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..core.exceptions import UnknownComponentError


class MonotoneMap:
    """A coordinatewise nondecreasing map f with ||f'||_inf <= sup_derivative."""

    def __init__(
        self,
        name: str,
        func: Callable[[np.ndarray], np.ndarray],
        sup_derivative: float,
        params: Optional[Dict[str, Any]] = None,
        slope: Optional[float] = None,
        intercept: float = 0.0,
    ):
        self.name = name
        self.func = func
        self.sup_derivative = float(sup_derivative)
        self.params = params or {}
        # Set only for affine maps.
        self.slope = slope
        self.intercept = intercept

    def __call__(self, x: Any) -> np.ndarray:
        return self.func(np.asarray(x, dtype=float))

    @property
    def is_affine(self) -> bool:
        return self.slope is not None

    def __repr__(self) -> str:
        return f"MonotoneMap({self.name}, {self.params})"


def _identity() -> MonotoneMap:
    return MonotoneMap("identity", lambda x: x, 1.0, slope=1.0)


def _affine(slope: float = 1.0, intercept: float = 0.0) -> MonotoneMap:
    if slope <= 0:
        raise ValueError(f"affine slope must be > 0, got {slope}")
    return MonotoneMap(
        "affine",
        lambda x: slope * x + intercept,
        slope,
        {"slope": slope, "intercept": intercept},
        slope=slope,
        intercept=intercept,
    )


def _tanh(scale: float = 1.0) -> MonotoneMap:
    if scale <= 0:
        raise ValueError(f"tanh scale must be > 0, got {scale}")
    return MonotoneMap("tanh", lambda x: np.tanh(scale * x), scale, {"scale": scale})


def _piecewise_linear(xs: Sequence[float], ys: Sequence[float]) -> MonotoneMap:
    xs_arr = np.asarray(xs, dtype=float)
    ys_arr = np.asarray(ys, dtype=float)
    if xs_arr.ndim != 1 or xs_arr.shape != ys_arr.shape or xs_arr.size < 2:
        raise ValueError("piecewise_linear needs matching knot vectors of length >= 2")
    if np.any(np.diff(xs_arr) <= 0):
        raise ValueError("piecewise_linear knots xs must be strictly increasing")
    if np.any(np.diff(ys_arr) < 0):
        raise ValueError("piecewise_linear values ys must be nondecreasing")
    slopes = np.diff(ys_arr) / np.diff(xs_arr)
    return MonotoneMap(
        "piecewise_linear",
        lambda x: np.interp(x, xs_arr, ys_arr),
        float(slopes.max()),
        {"xs": list(map(float, xs_arr)), "ys": list(map(float, ys_arr))},
    )


def _clip(lo: float = -1.0, hi: float = 1.0) -> MonotoneMap:
    if not lo < hi:
        raise ValueError(f"clip needs lo < hi, got {lo}, {hi}")
    return MonotoneMap("clip", lambda x: np.clip(x, lo, hi), 1.0, {"lo": lo, "hi": hi})


# Registry of map constructors
_MAP_REGISTRY: Dict[str, Callable[..., MonotoneMap]] = {
    "identity": _identity,
    "affine": _affine,
    "tanh": _tanh,
    "piecewise_linear": _piecewise_linear,
    "clip": _clip,
}


def register_map(name: str, factory: Callable[..., MonotoneMap]) -> None:
    """Register a constructor of nondecreasing maps."""
    _MAP_REGISTRY[name.lower()] = factory


def create_map(name: str, **params: Any) -> MonotoneMap:
    """
    Create a registered map.

    Raises:
        UnknownComponentError: If the map id is not registered
        ValueError: If the parameters would make the map decreasing
    """
    key = name.lower()
    if key not in _MAP_REGISTRY:
        raise UnknownComponentError("map", name, list(_MAP_REGISTRY))
    return _MAP_REGISTRY[key](**params)


def list_maps() -> List[str]:
    return sorted(_MAP_REGISTRY)


def check_map(f: MonotoneMap, lo: float = -10.0, hi: float = 10.0, points: int = 20001) -> bool:
    """True iff f is nondecreasing and within its derivative bound on a dense grid."""
    grid = np.linspace(lo, hi, points)
    values = f(grid)
    increments = np.diff(values)
    if np.any(increments < -1e-12):
        return False
    slopes = increments / np.diff(grid)
    return bool(np.all(slopes <= f.sup_derivative * (1.0 + 1e-9) + 1e-12))
