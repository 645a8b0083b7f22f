"""
Monte Carlo check of the central limit theorem for S_n.

R independent paths are reduced to their totals S_n, normalized, and compared
with the standard normal distribution by the one-sample Kolmogorov-Smirnov
distance against its asymptotic critical value.
"""

import logging
import math
from typing import Dict, List, Literal

import numpy as np
from scipy import stats

from ..core.exceptions import PreconditionError, UnknownComponentError
from ..core.models import CltVerdict, FamilySpec, SampleSummary
from ..core.scheme import BlockScheme
from ..covariance.profile import analytic_profile, long_run_variance, require_positive
from ..generators.replicate import simulate_block_sums

logger = logging.getLogger(__name__)

MIN_CLT_REPS = 100
DEFAULT_SAMPLE_BUDGET = 10**9

Normalizer = Literal["analytic_s_n", "empirical_s_n", "stationary_sigma_sqrt_n"]
NORMALIZERS: List[str] = ["analytic_s_n", "empirical_s_n", "stationary_sigma_sqrt_n"]


def ks_distance(samples: np.ndarray) -> float:
    """
    sup_x |F_R(x) - Phi(x)| for the empirical distribution function F_R.

    Raises:
        PreconditionError: With fewer than 2 samples
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise PreconditionError(f"KS distance needs >= 2 samples, got {x.size}")
    return float(stats.kstest(x, stats.norm.cdf, method="asymp").statistic)


def ks_critical(alpha: float, reps: int) -> float:
    """Asymptotic KS critical value sqrt(-ln(alpha/2)/2) / sqrt(R); 1.358/sqrt(R) at 0.05."""
    if not 0.0 < alpha < 1.0:
        raise PreconditionError(f"alpha must lie in (0, 1), got {alpha}")
    return math.sqrt(-math.log(alpha / 2.0) / 2.0) / math.sqrt(reps)


def summarize_samples(samples: np.ndarray) -> SampleSummary:
    x = np.asarray(samples, dtype=float)
    return SampleSummary(
        count=int(x.size),
        mean=float(x.mean()),
        sd=float(x.std(ddof=1)),
        skewness=float(stats.skew(x)),
        excess_kurtosis=float(stats.kurtosis(x, fisher=True)),
    )


def check_budget(n: int, reps: int, budget: int, allow_large: bool) -> None:
    """
    Guard the number of simulated values reps * n.

    Raises:
        PreconditionError: If the budget is exceeded without ``allow_large``
    """
    total = n * reps
    if total <= budget:
        return
    if not allow_large:
        raise PreconditionError(
            f"reps * n = {total} exceeds the sample budget {budget}; pass allow_large to run it"
        )
    logger.warning("reps * n = %d exceeds the sample budget %d", total, budget)


def _scale(spec: FamilySpec, n: int, normalizer: str, totals: np.ndarray) -> float:
    if normalizer == "analytic_s_n":
        return math.sqrt(require_positive(analytic_profile(spec, n).total()))
    if normalizer == "empirical_s_n":
        return math.sqrt(require_positive(float(np.var(totals, ddof=1))))
    if normalizer == "stationary_sigma_sqrt_n":
        lrv = long_run_variance(spec)
        if not lrv.finite:
            raise PreconditionError(f"{spec.label()} has no finite long-run variance")
        return math.sqrt(require_positive(lrv.sigma2) * n)
    raise UnknownComponentError("normalizer", normalizer, NORMALIZERS)


def run_clt(
    spec: FamilySpec,
    n: int,
    reps: int,
    seed: int,
    normalizer: str = "analytic_s_n",
    workers: int = 1,
    chunk_size: int = 256,
    alpha: float = 0.05,
    sample_budget: int = DEFAULT_SAMPLE_BUDGET,
    allow_large: bool = False,
) -> CltVerdict:
    """
    Test S_n / normalizer against N(0, 1).

    Args:
        spec: Family specification
        n: Sequence length
        reps: Number of replicates R (>= 100)
        seed: Master seed
        normalizer: analytic_s_n, empirical_s_n or stationary_sigma_sqrt_n
        workers: Concurrent generation tasks
        chunk_size: Replicates per task
        alpha: KS test level
        sample_budget: Largest reps * n run without ``allow_large``
        allow_large: Lift the budget (with a warning)

    Returns:
        CltVerdict; ``passed`` is ks_distance < ks_critical

    Raises:
        UnknownComponentError: For an unknown normalizer
        DegenerateVarianceError: If the normalizer is zero
        PreconditionError: Too few replicates, budget exceeded, or a normalizer
            the family cannot provide
    """
    if normalizer not in NORMALIZERS:
        raise UnknownComponentError("normalizer", normalizer, NORMALIZERS)
    if reps < MIN_CLT_REPS:
        raise PreconditionError(f"CLT run needs >= {MIN_CLT_REPS} replicates, got {reps}")
    check_budget(n, reps, sample_budget, allow_large)

    whole = BlockScheme(n=n, ell=n, m=1, r=0)
    sums = simulate_block_sums(spec, whole, reps, seed, workers=workers, chunk_size=chunk_size)
    totals = sums.totals()
    scale = _scale(spec, n, normalizer, totals)
    normalized = totals / scale

    distance = ks_distance(normalized)
    critical = ks_critical(alpha, reps)
    passed = distance < critical
    logger.info(
        "CLT %s n=%d reps=%d: KS %.5f vs %.5f (%s)",
        spec.label(), n, reps, distance, critical, "pass" if passed else "fail",
    )
    return CltVerdict(
        family=spec,
        n=n,
        reps=reps,
        seed=seed,
        normalizer=normalizer,
        scale=scale,
        summary=summarize_samples(normalized),
        ks_distance=distance,
        ks_critical=critical,
        alpha=alpha,
        passed=passed,
        samples=normalized,
    )


def moment_bounds(reps: int) -> Dict[str, float]:
    """Four-standard-error bands of the sample skewness and excess kurtosis under normality."""
    return {"skewness": 4.0 * math.sqrt(6.0 / reps), "excess_kurtosis": 4.0 * math.sqrt(24.0 / reps)}
