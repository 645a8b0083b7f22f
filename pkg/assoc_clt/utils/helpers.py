"""
Helper utility functions for assoc-clt.
"""

import asyncio
from typing import Any, Coroutine, Dict, List, Mapping, Sequence, Tuple, TypeVar, Union

T = TypeVar("T")

Rule = Union[str, Sequence[Tuple[str, str, Any]]]


async def run_with_concurrency_limit(
    tasks: List[Coroutine[Any, Any, T]],
    limit: int
) -> List[T]:
    """
    Run async tasks with a concurrency limit.

    Args:
        tasks: List of coroutines to execute
        limit: Maximum number of concurrent tasks

    Returns:
        List of results in the same order as input tasks
    """
    semaphore = asyncio.Semaphore(max(1, limit))

    async def bounded_task(task: Coroutine[Any, Any, T]) -> T:
        async with semaphore:
            return await task

    return await asyncio.gather(*[bounded_task(task) for task in tasks])


def chunk_bounds(total: int, chunk_size: int) -> List[Tuple[int, int]]:
    """Half-open [start, stop) ranges of at most chunk_size covering 0..total."""
    return [(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]


def _compare(operator: str, left: Any, right: Any) -> bool:
    if operator == "eq":
        return bool(left == right)
    if operator == "lt":
        return bool(left < right)
    if operator == "le":
        return bool(left <= right)
    if operator == "gt":
        return bool(left > right)
    if operator == "ge":
        return bool(left >= right)
    raise ValueError(f"Unknown operator: {operator}")


def calculate_verdict(metrics: Mapping[str, Any], rules: Dict[str, Rule]) -> str:
    """
    Calculate a verdict from named metrics and ordered rules.

    Each rule is a list of (metric, operator, value) clauses that must all
    hold; the first matching verdict wins. A rule equal to "default" is
    returned when nothing matches.

    Args:
        metrics: Metric values by name
        rules: Verdict rules, e.g.
            {
                "holds_empirically": [("distance", "lt", 0.05), ("settled", "eq", True)],
                "fails_empirically": [("distance", "gt", 0.1)],
                "inconclusive": "default",
            }

    Returns:
        Verdict string
    """
    default_verdict = None

    for verdict, rule in rules.items():
        if rule == "default":
            default_verdict = verdict
            continue
        if all(_compare(op, metrics[name], value) for name, op, value in rule):
            return verdict

    return default_verdict or "unknown"
