"""
Block variances of a blocking scheme, from a covariance profile or from simulated block sums.
"""

import math

import numpy as np

from ..core.exceptions import PreconditionError
from ..core.models import BlockStats, BlockSumSet, CovarianceProfile
from ..core.scheme import BlockScheme


def block_stats(profile: CovarianceProfile, scheme: BlockScheme) -> BlockStats:
    """
    Exact block variances of the scheme under the profile.

    Args:
        profile: Covariance of X_1..X_n
        scheme: Blocking scheme with the same n

    Returns:
        BlockStats with tau_j^2, the tail variance, Var(S_ml) and Var(S_n)

    Raises:
        PreconditionError: If scheme.n differs from profile.n
    """
    if scheme.n != profile.n:
        raise PreconditionError(f"scheme is for n={scheme.n}, profile has n={profile.n}")
    m, ell, covered = scheme.m, scheme.ell, scheme.covered
    if profile.is_stationary:
        tau_sq = np.full(m, profile.window_sum(0, ell))
        tail_var = profile.window_sum(covered, scheme.n)
        s_ml_sq = profile.window_sum(0, covered)
    else:
        gamma = np.asarray(profile.gamma)
        block_cov = gamma[:covered, :covered].reshape(m, ell, m, ell).sum(axis=(1, 3))
        tau_sq = np.diag(block_cov).copy()
        tail_var = float(gamma[covered:, covered:].sum())
        s_ml_sq = float(block_cov.sum())
    return BlockStats(
        scheme=scheme,
        tau_sq=np.clip(tau_sq, 0.0, None),
        tail_var=max(tail_var, 0.0),
        s_ml_sq=s_ml_sq,
        s_n_sq=profile.total(),
        source=profile.source,
    )


def block_stats_from_sums(sums: BlockSumSet) -> BlockStats:
    """
    Sample block variances across replicates, with standard errors for tau_j^2.

    Raises:
        PreconditionError: If fewer than 2 replicates are given
    """
    reps = sums.reps
    if reps < 2:
        raise PreconditionError(f"empirical block statistics need >= 2 replicates, got {reps}")
    centered = sums.block_sums - sums.block_sums.mean(axis=0)
    tau_sq = (centered**2).sum(axis=0) / (reps - 1)
    fourth = (centered**4).mean(axis=0)
    stderr = np.sqrt(np.clip(fourth - tau_sq**2, 0.0, None) / reps)
    return BlockStats(
        scheme=sums.scheme,
        tau_sq=tau_sq,
        tail_var=float(np.var(sums.tail_sums, ddof=1)),
        s_ml_sq=float(np.var(sums.partial_totals(), ddof=1)),
        s_n_sq=float(np.var(sums.totals(), ddof=1)),
        source="empirical",
        tau_sq_stderr=stderr,
    )


def cross_block_mass(profile: CovarianceProfile, scheme: BlockScheme) -> float:
    """Sum of Gamma_ij over ordered pairs (i, j) in different blocks, the tail counting as block m+1."""
    labels = np.minimum(np.arange(scheme.n) // scheme.ell, scheme.m)
    if profile.is_stationary:
        gamma = profile.matrix()
    else:
        gamma = np.asarray(profile.gamma)
    different = labels[:, None] != labels[None, :]
    return float(math.fsum(gamma[different]))
