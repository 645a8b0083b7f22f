"""
Characteristic-function gaps between block sums and their independent counterparts.

For associated variables the gap between a joint characteristic function
and the product of the marginal ones is bounded by the pairwise covariances:

    |psi_X(t) - prod_i psi_X_i(t_i)| <= 1/2 sum_{i != j} |t_i t_j| Cov(X_i, X_j)

Empirical gaps are estimated from one set of replicates (block sums and
their product reuse the same rows); their standard errors come from an
exact leave-one-out jackknife. Gaussian families have closed forms.
"""

import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import PreconditionError
from ..core.models import BlockStats, BlockSumSet, CFGap, ReplicateSet
from ..core.scheme import BlockScheme
from ..covariance.profile import require_positive
from ..generators.replicate import block_sums_from_replicates
from ..utils.helpers import chunk_bounds

MIN_GAP_REPS = 1000
# Rows per batch of the leave-one-out products.
_JACKKNIFE_ROWS = 512

Estimate = Tuple[complex, np.ndarray]


# ---------------------------------------------------------------------------
# Bounds and exact Gaussian gaps
# ---------------------------------------------------------------------------


def newman_gap_bound(stats: BlockStats, t: float) -> float:
    """(t^2/2) (s_ml^2 - nu^2) / s_n^2: the bound for the m full blocks of S_ml / s_n."""
    s_n2 = require_positive(stats.s_n_sq)
    return 0.5 * t * t * max(stats.s_ml_sq - stats.nu_sq, 0.0) / s_n2


def full_block_bound(stats: BlockStats, t: float) -> float:
    """(t^2/2) (cross-block mass) / s_n^2 with the tail as block m+1."""
    s_n2 = require_positive(stats.s_n_sq)
    return 0.5 * t * t * max(stats.cross_block_mass, 0.0) / s_n2


def newman_cf_bound(cov: np.ndarray, t: Sequence[float]) -> float:
    """1/2 sum_{i != j} |t_i t_j| Cov(X_i, X_j)."""
    cov = np.asarray(cov, dtype=float)
    weights = np.abs(np.outer(t, t))
    np.fill_diagonal(weights, 0.0)
    return 0.5 * float((weights * cov).sum())


def gaussian_joint_cf_gap(cov: np.ndarray, t: Sequence[float]) -> float:
    """Exact |psi_X(t) - prod_i psi_X_i(t_i)| for a centered Gaussian vector."""
    cov = np.asarray(cov, dtype=float)
    t_vec = np.asarray(t, dtype=float)
    joint = math.exp(-0.5 * float(t_vec @ cov @ t_vec))
    product = math.exp(-0.5 * float(np.sum(t_vec**2 * np.diag(cov))))
    return abs(joint - product)


def _gaussian_cf(t: float, variance: float, s_n2: float) -> float:
    return math.exp(-0.5 * t * t * variance / s_n2)


def analytic_block_gap(stats: BlockStats, t_grid: Sequence[float], tol: float = 1e-10) -> List[CFGap]:
    """|Psi_{S_ml/s_n}(t) - prod_j Psi_{Y_j}(sqrt(l) t / s_n)| for Gaussian blocks."""
    s_n2 = require_positive(stats.s_n_sq)
    gaps = []
    for t in t_grid:
        gap = abs(_gaussian_cf(t, stats.s_ml_sq, s_n2) - _gaussian_cf(t, stats.nu_sq, s_n2))
        bound = newman_gap_bound(stats, t)
        gaps.append(CFGap(t=t, gap=gap, bound=bound, holds=gap <= bound + tol, source="analytic"))
    return gaps


def analytic_full_block_gap(
    stats: BlockStats, t_grid: Sequence[float], tol: float = 1e-10
) -> List[CFGap]:
    """|Psi_{S_n/s_n}(t) - prod over the m+1 blocks| for Gaussian blocks."""
    s_n2 = require_positive(stats.s_n_sq)
    independent = stats.nu_sq + stats.tail_var
    gaps = []
    for t in t_grid:
        gap = abs(math.exp(-0.5 * t * t) - _gaussian_cf(t, independent, s_n2))
        bound = full_block_bound(stats, t)
        gaps.append(CFGap(t=t, gap=gap, bound=bound, holds=gap <= bound + tol, source="analytic"))
    return gaps


def analytic_product_limit(stats: BlockStats, t_grid: Sequence[float]) -> List[CFGap]:
    """|prod_j Psi_{Y_j}(sqrt(l) t / s_n) - exp(-t^2/2)| for Gaussian blocks."""
    s_n2 = require_positive(stats.s_n_sq)
    return [
        CFGap(
            t=t,
            gap=abs(_gaussian_cf(t, stats.nu_sq, s_n2) - math.exp(-0.5 * t * t)),
            source="analytic",
        )
        for t in t_grid
    ]


def analytic_truncation_gap(
    stats: BlockStats, t_grid: Sequence[float], tol: float = 1e-10
) -> List[CFGap]:
    """|Psi_{S_n/s_n}(t) - Psi_{S_ml/s_n}(t)| against |t| sqrt(tail_var) / s_n."""
    s_n2 = require_positive(stats.s_n_sq)
    gaps = []
    for t in t_grid:
        gap = abs(math.exp(-0.5 * t * t) - _gaussian_cf(t, stats.s_ml_sq, s_n2))
        bound = abs(t) * math.sqrt(stats.tail_var / s_n2)
        gaps.append(CFGap(t=t, gap=gap, bound=bound, holds=gap <= bound + tol, source="analytic"))
    return gaps


# ---------------------------------------------------------------------------
# Monte Carlo gaps
# ---------------------------------------------------------------------------


def _as_sums(data: Union[ReplicateSet, BlockSumSet], scheme: Optional[BlockScheme]) -> BlockSumSet:
    if isinstance(data, ReplicateSet):
        if scheme is None:
            raise PreconditionError("a scheme is needed to block raw replicates")
        data = block_sums_from_replicates(data, scheme)
    elif scheme is not None and data.scheme != scheme:
        raise PreconditionError("block sums belong to a different scheme")
    if data.reps < MIN_GAP_REPS:
        raise PreconditionError(f"CF gaps need >= {MIN_GAP_REPS} replicates, got {data.reps}")
    return data


def _mean_estimate(terms: np.ndarray) -> Estimate:
    """Sample mean and its leave-one-out values."""
    count = terms.size
    total = terms.sum()
    return complex(total / count), (total - terms) / (count - 1)


def _product_estimate(terms: np.ndarray) -> Estimate:
    """prod_j mean_k terms[k, j] and its leave-one-out values, terms of shape (R, k)."""
    count = terms.shape[0]
    totals = terms.sum(axis=0)
    loo = np.empty(count, dtype=complex)
    for start, stop in chunk_bounds(count, _JACKKNIFE_ROWS):
        loo[start:stop] = np.prod((totals - terms[start:stop]) / (count - 1), axis=1)
    return complex(np.prod(totals / count)), loo


def _constant(value: complex, count: int) -> Estimate:
    return value, np.full(count, value, dtype=complex)


def _jackknife_gap(left: Estimate, right: Estimate) -> Tuple[float, float]:
    gap = abs(left[0] - right[0])
    loo = np.abs(left[1] - right[1])
    count = loo.size
    stderr = math.sqrt((count - 1) / count * float(np.sum((loo - loo.mean()) ** 2)))
    return gap, stderr


def _phases(values: np.ndarray, u: float) -> np.ndarray:
    return np.exp(1j * u * values)


def _normalizer(sums: BlockSumSet, stats: Optional[BlockStats]) -> Tuple[BlockStats, float]:
    if stats is None:
        from ..blocking.stats import block_stats_from_sums

        stats = block_stats_from_sums(sums)
    return stats, math.sqrt(require_positive(stats.s_n_sq))


def cf_block_gap(
    data: Union[ReplicateSet, BlockSumSet],
    t_grid: Sequence[float],
    scheme: Optional[BlockScheme] = None,
    stats: Optional[BlockStats] = None,
) -> List[CFGap]:
    """
    |Psi_{S_ml/s_n}(t) - prod_j Psi_{Y_j}(sqrt(l) t / s_n)| checked against its covariance bound.

    Args:
        data: Replicates (blocked with ``scheme``) or block sums
        t_grid: Arguments t
        scheme: Required when ``data`` holds raw paths
        stats: Block statistics giving s_n^2 and the bound; estimated from
            the sums when omitted

    Returns:
        One CFGap per t, with holds = gap <= bound + 3 stderr
    """
    sums = _as_sums(data, scheme)
    stats, s_n = _normalizer(sums, stats)
    partial = sums.partial_totals()
    gaps = []
    for t in t_grid:
        u = t / s_n
        gap, stderr = _jackknife_gap(
            _mean_estimate(_phases(partial, u)), _product_estimate(_phases(sums.block_sums, u))
        )
        bound = newman_gap_bound(stats, t)
        gaps.append(CFGap(t=t, gap=gap, stderr=stderr, bound=bound, holds=gap <= bound + 3 * stderr))
    return gaps


def cf_full_block_gap(
    data: Union[ReplicateSet, BlockSumSet],
    t_grid: Sequence[float],
    scheme: Optional[BlockScheme] = None,
    stats: Optional[BlockStats] = None,
) -> List[CFGap]:
    """|Psi_{S_n/s_n}(t) - prod over the m+1 blocks|, the tail counting as the last block."""
    sums = _as_sums(data, scheme)
    stats, s_n = _normalizer(sums, stats)
    totals = sums.totals()
    blocks = sums.block_sums
    if sums.scheme.r > 0:
        blocks = np.column_stack([blocks, sums.tail_sums])
    gaps = []
    for t in t_grid:
        u = t / s_n
        gap, stderr = _jackknife_gap(
            _mean_estimate(_phases(totals, u)), _product_estimate(_phases(blocks, u))
        )
        bound = full_block_bound(stats, t)
        gaps.append(CFGap(t=t, gap=gap, stderr=stderr, bound=bound, holds=gap <= bound + 3 * stderr))
    return gaps


def cf_product_limit(
    data: Union[ReplicateSet, BlockSumSet],
    t_grid: Sequence[float],
    scheme: Optional[BlockScheme] = None,
    stats: Optional[BlockStats] = None,
) -> List[CFGap]:
    """|prod_j Psi_{Y_j}(sqrt(l) t / s_n) - exp(-t^2/2)|."""
    sums = _as_sums(data, scheme)
    stats, s_n = _normalizer(sums, stats)
    gaps = []
    for t in t_grid:
        gap, stderr = _jackknife_gap(
            _product_estimate(_phases(sums.block_sums, t / s_n)),
            _constant(complex(math.exp(-0.5 * t * t)), sums.reps),
        )
        gaps.append(CFGap(t=t, gap=gap, stderr=stderr))
    return gaps


def cf_truncation_gap(
    data: Union[ReplicateSet, BlockSumSet],
    t_grid: Sequence[float],
    scheme: Optional[BlockScheme] = None,
    stats: Optional[BlockStats] = None,
) -> List[CFGap]:
    """|Psi_{S_n/s_n}(t) - Psi_{S_ml/s_n}(t)| against |t| sqrt(tail_var) / s_n."""
    sums = _as_sums(data, scheme)
    stats, s_n = _normalizer(sums, stats)
    totals, partial = sums.totals(), sums.partial_totals()
    gaps = []
    for t in t_grid:
        u = t / s_n
        gap, stderr = _jackknife_gap(
            _mean_estimate(_phases(totals, u)), _mean_estimate(_phases(partial, u))
        )
        bound = abs(t) * math.sqrt(stats.tail_var) / s_n
        gaps.append(CFGap(t=t, gap=gap, stderr=stderr, bound=bound, holds=gap <= bound + 3 * stderr))
    return gaps
