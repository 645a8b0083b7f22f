"""
Trend verdicts for condition trajectories.

A condition of the form "value -> target as n -> infinity" is judged on a
finite grid by three rules:

    limit:         the last distance to the target is below limit_tol and the
                   last three distances have settled; fails when the last
                   distance exceeds 2 * limit_tol and the log-log trend is
                   flat or diverging
    bounded_below: every value stays above a threshold and the last value has
                   not decayed below half the running maximum
    bounded_above: the trajectory stays finite and at most doubles
"""

import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..core.models import ConditionReport, ConditionValue, Tolerances, VerdictRule
from ..utils.helpers import calculate_verdict

# Allowed increase between consecutive distances, as a fraction of limit_tol.
SETTLE_SLACK = 0.1
# Growth slope above which a bounded_above trajectory is judged divergent.
GROWTH_SLOPE = 0.5


def trend_slope(axis: Sequence[float], values: Sequence[float], floor: float) -> Optional[float]:
    """Least-squares slope of log(max(value, floor)) against log(axis)."""
    if len(axis) < 2:
        return None
    x = np.log(np.asarray(axis, dtype=float))
    y = np.log(np.maximum(np.abs(np.asarray(values, dtype=float)), floor))
    if np.ptp(x) == 0:
        return None
    return float(np.polyfit(x, y, 1)[0])


def _settled(distances: Sequence[float], slack: float) -> bool:
    tail = list(distances[-3:])
    return all(b <= a + slack for a, b in zip(tail, tail[1:]))


def _limit_verdict(
    distances: List[float], slope: Optional[float], tol: Tolerances
) -> Dict[str, object]:
    metrics = {
        "distance": distances[-1],
        "settled": _settled(distances, SETTLE_SLACK * tol.limit_tol),
        "slope": 0.0 if slope is None else slope,
    }
    rules = {
        "holds_empirically": [("distance", "lt", tol.limit_tol), ("settled", "eq", True)],
        "fails_empirically": [
            ("distance", "gt", 2.0 * tol.limit_tol),
            ("slope", "gt", -tol.trend_tol),
        ],
        "inconclusive": "default",
    }
    return {
        "verdict": calculate_verdict(metrics, rules),
        "thresholds": {
            "limit_tol": tol.limit_tol,
            "fail_distance": 2.0 * tol.limit_tol,
            "trend_tol": tol.trend_tol,
            "settle_slack": SETTLE_SLACK * tol.limit_tol,
        },
    }


def _bounded_below_verdict(values: List[float], threshold: float) -> Dict[str, object]:
    metrics = {
        "minimum": min(values),
        "last": values[-1],
        "decay": values[-1] - 0.5 * max(values),
    }
    rules = {
        "fails_empirically": [("last", "lt", threshold)],
        "holds_empirically": [("minimum", "ge", threshold), ("decay", "ge", 0.0)],
        "inconclusive": "default",
    }
    return {"verdict": calculate_verdict(metrics, rules), "thresholds": {"lower": threshold}}


def _bounded_above_verdict(values: List[float], slope: Optional[float]) -> Dict[str, object]:
    finite = all(math.isfinite(v) for v in values)
    metrics = {
        "finite": finite,
        "growth": values[-1] - 2.0 * values[0] if finite else math.inf,
        "slope": 0.0 if slope is None else slope,
    }
    rules = {
        "holds_empirically": [("finite", "eq", True), ("growth", "le", 0.0)],
        "fails_empirically": [("slope", "gt", GROWTH_SLOPE)],
        "inconclusive": "default",
    }
    if not finite:
        return {"verdict": "fails_empirically", "thresholds": {"growth_slope": GROWTH_SLOPE}}
    return {
        "verdict": calculate_verdict(metrics, rules),
        "thresholds": {"growth_factor": 2.0, "growth_slope": GROWTH_SLOPE},
    }


def judge_trajectory(
    condition_id: str,
    grid: List[ConditionValue],
    tolerances: Tolerances,
    rule: VerdictRule = "limit",
    axis: str = "n",
    threshold: float = 0.0,
    source: str = "analytic",
    note: Optional[str] = None,
) -> ConditionReport:
    """
    Attach a verdict to a condition trajectory.

    Args:
        condition_id: Condition name
        grid: Values in increasing axis order
        tolerances: Decision thresholds
        rule: limit, bounded_below or bounded_above
        axis: "n" or "r"
        threshold: Lower bound of the bounded_below rule
        source: analytic, empirical or a mix
        note: Free text carried into the report

    Returns:
        ConditionReport
    """
    if not grid:
        raise ValueError(f"condition {condition_id} has an empty grid")
    positions = [float(v.r if axis == "r" and v.r is not None else v.n) for v in grid]
    values = [v.value for v in grid]
    if rule == "limit":
        distances = [v.distance for v in grid]
        slope = trend_slope(positions, distances, tolerances.analytic_tol)
        outcome = _limit_verdict(distances, slope, tolerances)
    elif rule == "bounded_below":
        slope = trend_slope(positions, values, tolerances.analytic_tol)
        outcome = _bounded_below_verdict(values, threshold)
    else:
        slope = trend_slope(positions, values, tolerances.analytic_tol)
        outcome = _bounded_above_verdict(values, slope)
    return ConditionReport(
        condition_id=condition_id,
        axis=axis,  # type: ignore[arg-type]
        rule=rule,
        grid=grid,
        verdict=outcome["verdict"],  # type: ignore[arg-type]
        thresholds=outcome["thresholds"],  # type: ignore[arg-type]
        trend_slope=slope,
        source=source,
        note=note,
    )
