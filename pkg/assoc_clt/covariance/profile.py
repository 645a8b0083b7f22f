"""
Analytic and empirical covariance profiles and the scalars derived from them.
"""

import logging
import math
from typing import Sequence

import numpy as np

from ..core.exceptions import (
    DegenerateVarianceError,
    PreconditionError,
    UnknownAnalyticError,
)
from ..core.models import (
    CovarianceProfile,
    CovarianceReport,
    FamilySpec,
    LongRunVariance,
    ProbeResult,
    ReplicateSet,
)
from ..generators.factory import create_family

logger = logging.getLogger(__name__)


def analytic_profile(spec: FamilySpec, n: int) -> CovarianceProfile:
    """
    Exact stationary covariance of X_1..X_n.

    Args:
        spec: Family specification
        n: Sequence length

    Returns:
        Profile holding gamma(0..n-1)
    """
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    family = create_family(spec)
    return CovarianceProfile(n=n, source="analytic", family=spec, gamma=family.autocovariance(n))


def empirical_profile(reps: ReplicateSet) -> CovarianceProfile:
    """
    Unbiased sample covariance matrix across replicates.

    The per-entry standard error is the standard error of the mean of the
    centered cross products.

    Raises:
        PreconditionError: If fewer than 2 replicates are given
    """
    if reps.reps < 2:
        raise PreconditionError(f"empirical covariance needs >= 2 replicates, got {reps.reps}")
    x = reps.values - reps.values.mean(axis=0)
    count = reps.reps
    cross = x.T @ x
    cov = cross / (count - 1)
    cov = 0.5 * (cov + cov.T)
    second = (x**2).T @ (x**2) / count
    spread = np.clip(second - (cross / count) ** 2, 0.0, None)
    return CovarianceProfile(
        n=reps.n,
        source="empirical",
        family=reps.family,
        reps=count,
        gamma=cov,
        stderr=np.sqrt(spread / count),
    )


def s_n_squared(profile: CovarianceProfile) -> float:
    """s_n^2 = Var(S_n) = sum_{i,j} Gamma_ij."""
    return profile.total()


def require_positive(s_n2: float) -> float:
    """Return s_n^2, raising when it is zero."""
    if not s_n2 > 0:
        raise DegenerateVarianceError(f"s_n^2 = {s_n2}: the partial sum is degenerate")
    return s_n2


def long_run_variance(spec: FamilySpec) -> LongRunVariance:
    """sigma^2 = Var(X_1) + 2 sum_{j>=2} Cov(X_1, X_j), or a divergence signal."""
    lrv = create_family(spec).long_run_variance()
    if not lrv.finite:
        logger.info("Long-run variance of %s diverges", spec.label())
    return lrv


def stationary_ratio(profile: CovarianceProfile, lrv: LongRunVariance) -> float:
    """
    s_n^2 / (n sigma^2), which tends to 1 for summable stationary covariances.

    Raises:
        PreconditionError: If sigma^2 is not finite and positive
    """
    if not lrv.finite or lrv.sigma2 <= 0:
        raise PreconditionError(f"stationary ratio needs a finite positive sigma^2, got {lrv.sigma2}")
    return s_n_squared(profile) / (profile.n * lrv.sigma2)


def cox_coefficient(profile: CovarianceProfile, r: int) -> float:
    """
    u(r) = max_j sum_{i: |i-j| >= r} Cov(X_i, X_j) over the window 1..n.

    Raises:
        PreconditionError: If r < 0
    """
    if r < 0:
        raise PreconditionError(f"r must be >= 0, got {r}")
    n = profile.n
    if r >= n:
        return 0.0
    if profile.is_stationary:
        gamma = np.array(profile.gamma)
        gamma[:r] = 0.0
        partial = np.cumsum(gamma)
        j = np.arange(n)
        # Row j: lags r..j to the left plus lags r..n-1-j to the right.
        rows = partial[j] + partial[n - 1 - j]
        if r == 0:
            rows = rows - gamma[0]
        return float(rows.max())
    idx = np.arange(n)
    mask = np.abs(idx[:, None] - idx[None, :]) >= r
    return float(np.where(mask, profile.gamma, 0.0).sum(axis=1).max())


def cox_coefficient_limit(spec: FamilySpec, r: int) -> float:
    """u(r) over the infinite sequence (inf when the covariances are not summable)."""
    if r < 0:
        raise PreconditionError(f"r must be >= 0, got {r}")
    value = create_family(spec).cox_limit(r)
    return value if math.isfinite(value) else math.inf


def summarize_profile(
    profile: CovarianceProfile,
    r_values: Sequence[int],
    probes: Sequence[ProbeResult] = (),
) -> CovarianceReport:
    """Collect s_n^2, sigma^2 and u(r) of a profile into one report."""
    spec = profile.family
    if spec is None:
        raise PreconditionError("profile carries no family")
    try:
        lrv = long_run_variance(spec)
        limits = [[float(r), cox_coefficient_limit(spec, r)] for r in r_values]
    except UnknownAnalyticError as e:
        logger.warning("No closed-form long-run quantities for %s: %s", spec.label(), e)
        lrv = LongRunVariance(sigma2=math.nan, finite=False, method="divergent")
        limits = []
    ratio = stationary_ratio(profile, lrv) if lrv.finite and lrv.sigma2 > 0 else None
    return CovarianceReport(
        n=profile.n,
        source=profile.source,
        family=spec,
        s_n2=s_n_squared(profile),
        sigma2=lrv.sigma2 if lrv.finite else None,
        sigma2_finite=lrv.finite,
        stationary_ratio=ratio,
        u=[[float(r), cox_coefficient(profile, r)] for r in r_values],
        u_limit=[pair for pair in limits if math.isfinite(pair[1])],
        probes=list(probes),
    )
