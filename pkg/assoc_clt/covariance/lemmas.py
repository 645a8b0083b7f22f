"""
Numerical certificates for the covariance identities of associated variables.

hoeffding_cov evaluates Cov(X, Y) = integral of
H(x, y) = P(X > x, Y > y) - P(X > x) P(Y > y) exactly for finite discrete
laws and serves as the independent oracle for covariance computations.
"""

import math
from typing import Mapping, Tuple

import numpy as np

from ..core.exceptions import PreconditionError
from ..core.models import NewmanCheck
from ..generators.rng import generator_from_seed
from .battery import MonotonePair

MIN_LEMMA_SAMPLES = 1000


def _as_table(
    joint: Mapping[Tuple[float, float], float], tol: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not joint:
        raise PreconditionError("joint distribution is empty")
    xs = np.array(sorted({float(x) for x, _ in joint}))
    ys = np.array(sorted({float(y) for _, y in joint}))
    table = np.zeros((xs.size, ys.size))
    for (x, y), p in joint.items():
        if not (math.isfinite(p) and p >= 0):
            raise PreconditionError(f"probability of ({x}, {y}) must be finite and >= 0, got {p}")
        table[np.searchsorted(xs, float(x)), np.searchsorted(ys, float(y))] += p
    total = table.sum()
    if abs(total - 1.0) > tol:
        raise PreconditionError(f"probabilities sum to {total!r}, not 1")
    return xs, ys, table


def hoeffding_cov(joint: Mapping[Tuple[float, float], float], tol: float = 1e-10) -> float:
    """
    Covariance of a finite discrete pair through the H-integral.

    H is constant on the cells [x_a, x_{a+1}) x [y_b, y_{b+1}) of the support
    grid and zero outside it, so the integral is a finite sum.

    Args:
        joint: Mapping (x, y) -> P(X = x, Y = y)
        tol: Allowed deviation of the total mass from 1

    Returns:
        Cov(X, Y)

    Raises:
        PreconditionError: If the probabilities are invalid or do not sum to 1
    """
    xs, ys, table = _as_table(joint, tol)
    if xs.size < 2 or ys.size < 2:
        return 0.0
    # upper[a, b] = P(X >= x_a, Y >= y_b)
    upper = table[::-1, ::-1].cumsum(axis=0).cumsum(axis=1)[::-1, ::-1]
    x_tail = table.sum(axis=1)[::-1].cumsum()[::-1][1:]
    y_tail = table.sum(axis=0)[::-1].cumsum()[::-1][1:]
    h = upper[1:, 1:] - np.outer(x_tail, y_tail)
    return float(np.diff(xs) @ h @ np.diff(ys))


def hoeffding_copies_cov(x: np.ndarray, y: np.ndarray, seed: int) -> Tuple[float, float]:
    """
    Monte Carlo Cov(X, Y) through 2 Cov(X, Y) = E (X1 - X2)(Y1 - Y2).

    The sample is shuffled with ``seed`` and split into two halves that act
    as the independent copies.

    Returns:
        (estimate, standard error)
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 4:
        raise PreconditionError("need two equal-length samples with at least 4 points")
    order = generator_from_seed(seed).permutation(x.size)
    half = x.size // 2
    first, second = order[:half], order[half : 2 * half]
    terms = 0.5 * (x[first] - x[second]) * (y[first] - y[second])
    return float(terms.mean()), float(terms.std(ddof=1) / math.sqrt(half))


def sample_cov(u: np.ndarray, v: np.ndarray) -> Tuple[float, float]:
    """Unbiased sample covariance and the standard error of the centered products."""
    products = (u - u.mean()) * (v - v.mean())
    count = u.size
    return float(products.sum() / (count - 1)), float(products.std(ddof=1) / math.sqrt(count))


def newman_functional_check(x: np.ndarray, y: np.ndarray, pair: MonotonePair) -> NewmanCheck:
    """
    Check |Cov(f(X), g(Y))| <= ||f'|| ||g'|| Cov(X, Y) on paired samples.

    holds = lhs <= rhs + 3 * (stderr(lhs) + bound * stderr(rhs)).

    Raises:
        PreconditionError: On fewer than 1000 samples or non-finite values
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise PreconditionError("x and y must be equal-length vectors")
    if x.size < MIN_LEMMA_SAMPLES:
        raise PreconditionError(f"need >= {MIN_LEMMA_SAMPLES} samples, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise PreconditionError("samples must be finite")
    lhs_cov, lhs_se = sample_cov(pair.f(x), pair.g(y))
    rhs_cov, rhs_se = sample_cov(x, y)
    bound = pair.bound
    stderr = lhs_se + bound * rhs_se
    lhs = abs(lhs_cov)
    rhs = bound * rhs_cov
    return NewmanCheck(
        pair=pair.name,
        lhs=lhs,
        rhs=rhs,
        bound=bound,
        stderr=stderr,
        holds=lhs <= rhs + 3.0 * stderr,
    )
