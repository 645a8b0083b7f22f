"""
Statistical probes for association and the demimartingale property.

Both probes flag a violation when some estimated covariance falls more than
three standard errors below zero.
"""

import logging
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..core.exceptions import PreconditionError
from ..core.models import ProbeResult, ReplicateSet
from ..generators.factory import create_family
from .battery import MonotoneTestBattery, default_battery
from .lemmas import sample_cov

logger = logging.getLogger(__name__)

MIN_PROBE_REPS = 1000
VIOLATION_SIGMAS = 3.0

Statistic = Callable[[np.ndarray, Callable[[np.ndarray], np.ndarray]], np.ndarray]


# Coordinatewise nondecreasing functions of (S_1, ..., S_j), evaluated for every j at once.
_PARTIAL_SUM_STATISTICS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "S_j": lambda s: s,
    "max_S": lambda s: np.maximum.accumulate(s, axis=1),
    "mean_S": lambda s: np.cumsum(s, axis=1) / np.arange(1, s.shape[1] + 1),
}


def _path_statistics(n: int) -> Dict[str, Tuple[Statistic, Statistic]]:
    """Pairs of coordinatewise nondecreasing path statistics built from a scalar map."""
    second = min(1, n - 1)
    stats: Dict[str, Tuple[Statistic, Statistic]] = {
        "first~second": (lambda x, f: f(x[:, 0]), lambda x, g: g(x[:, second])),
        "sum~sum": (lambda x, f: f(x).sum(axis=1), lambda x, g: g(x).sum(axis=1)),
        "max~min": (lambda x, f: f(x.max(axis=1)), lambda x, g: g(x.min(axis=1))),
    }
    if n >= 2:
        half = n // 2
        stats["front~back"] = (
            lambda x, f: f(x[:, :half]).sum(axis=1),
            lambda x, g: g(x[:, half:]).sum(axis=1),
        )
    return stats


def _summarize(probe: str, values: List[Tuple[str, float, float]]) -> ProbeResult:
    def score(item: Tuple[str, float, float]) -> float:
        _, value, stderr = item
        if stderr > 0:
            return value / stderr
        return -np.inf if value < 0 else np.inf if value > 0 else 0.0

    name, value, stderr = min(values, key=score)
    flag = any(v < -VIOLATION_SIGMAS * se for _, v, se in values)
    if flag:
        logger.warning("%s probe flagged %s: %.4g (stderr %.2g)", probe, name, value, stderr)
    return ProbeResult(
        probe=probe,  # type: ignore[arg-type]
        min_value=value,
        min_stderr=stderr,
        argmin=name,
        evaluated=len(values),
        flag=flag,
    )


def association_probe(
    reps: ReplicateSet, battery: Optional[MonotoneTestBattery] = None
) -> ProbeResult:
    """
    Estimate Cov(F(X), G(X)) for nondecreasing path functionals F, G.

    Every battery pair (f, g) is composed with each path statistic
    (first vs second coordinate, full sums, front vs back half sums, max vs
    min), all of which stay coordinatewise nondecreasing.

    Raises:
        PreconditionError: If fewer than 1000 replicates are given
    """
    if reps.reps < MIN_PROBE_REPS:
        raise PreconditionError(f"association probe needs >= {MIN_PROBE_REPS} replicates")
    battery = battery or default_battery()
    x = reps.values
    values = []
    for pair in battery:
        for label, (left, right) in _path_statistics(reps.n).items():
            cov, stderr = sample_cov(left(x, pair.f), right(x, pair.g))
            values.append((f"{pair.name}:{label}", cov, stderr))
    return _summarize("association", values)


def demimartingale_probe(
    reps: ReplicateSet,
    battery: Optional[MonotoneTestBattery] = None,
    mean_tol: float = 1e-12,
) -> ProbeResult:
    """
    Estimate E[(S_{j+1} - S_j) g(T_j)] for j = 1..n-1 and every battery map g.

    T_j runs over S_j, max(S_1..S_j) and the mean of S_1..S_j, so g(T_j) is a
    coordinatewise nondecreasing function of the first j partial sums.

    Raises:
        PreconditionError: If the family is not centered or reps < 1000
    """
    if reps.reps < MIN_PROBE_REPS:
        raise PreconditionError(f"demimartingale probe needs >= {MIN_PROBE_REPS} replicates")
    if reps.n < 2:
        raise PreconditionError("demimartingale probe needs n >= 2")
    mean = create_family(reps.family).mean()
    if abs(mean) > mean_tol:
        raise PreconditionError(f"family {reps.family.label()} has mean {mean:.6g}, not 0")
    battery = battery or default_battery()
    partial = np.cumsum(reps.values, axis=1)[:, :-1]
    increments = reps.values[:, 1:]
    root = np.sqrt(reps.reps)
    values = []
    for pair in battery:
        for label, statistic in _PARTIAL_SUM_STATISTICS.items():
            products = increments * pair.g(statistic(partial))
            means = products.mean(axis=0)
            stderrs = products.std(axis=0, ddof=1) / root
            for j, (value, stderr) in enumerate(zip(means, stderrs), start=1):
                values.append((f"{pair.g.name}({label}):j={j}", float(value), float(stderr)))
    return _summarize("demimartingale", values)
