"""
Empirical characteristic functions.
"""

import math
from typing import List, Sequence

import numpy as np

from ..core.exceptions import PreconditionError
from ..core.models import CFPoint

MIN_ECF_SAMPLES = 1000


def ecf(samples: np.ndarray, t_grid: Sequence[float]) -> List[CFPoint]:
    """
    Sample mean of exp(itX) at every t.

    The standard error combines the standard errors of the cosine and sine
    means.

    Args:
        samples: Real sample of X
        t_grid: Finite arguments

    Returns:
        One CFPoint per t, in grid order

    Raises:
        PreconditionError: On empty or short samples, or a non-finite t
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise PreconditionError("ecf of an empty sample")
    if x.size < MIN_ECF_SAMPLES:
        raise PreconditionError(f"ecf needs >= {MIN_ECF_SAMPLES} samples, got {x.size}")
    if not all(math.isfinite(t) for t in t_grid):
        raise PreconditionError("t_grid must be finite")
    root = math.sqrt(x.size)
    points = []
    for t in t_grid:
        phase = t * x
        cos, sin = np.cos(phase), np.sin(phase)
        stderr = math.hypot(float(cos.std(ddof=1)), float(sin.std(ddof=1))) / root
        points.append(CFPoint(t=t, re=float(cos.mean()), im=float(sin.mean()), stderr=stderr))
    return points
