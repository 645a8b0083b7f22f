"""
Per-grid data shared by the evaluators of one experiment.
"""

import logging
from typing import Dict, List, Optional, Tuple

from ..core.exceptions import UnknownAnalyticError
from ..core.models import BlockStats, BlockSumSet, CovarianceProfile, ExperimentConfig
from ..core.scheme import BlockScheme, make_block_scheme
from ..covariance.profile import analytic_profile, require_positive
from ..generators.factory import create_family
from ..generators.replicate import simulate_block_sums
from .stats import block_stats, block_stats_from_sums

logger = logging.getLogger(__name__)


class GridContext:
    """
    Caches schemes, covariance profiles and simulated block sums per n.

    Covariance-based quantities come from the analytic profile whenever the
    family has one (unless mode is "empirical"). Distributional quantities
    (moments, truncated moments, characteristic functions) use Gaussian
    closed forms in analytic mode and Monte Carlo block sums otherwise.
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.spec = config.family
        self.family = create_family(config.family)
        self.tolerances = config.tolerances
        self.analytic = config.mode == "analytic" or (
            config.mode == "auto" and self.family.is_gaussian
        )
        # Forced analytic mode on a non-Gaussian family.
        self.fallback = self.analytic and not self.family.is_gaussian
        if self.fallback:
            logger.warning(
                "Analytic mode requested for non-Gaussian %s; moments fall back to Monte Carlo",
                self.spec.label(),
            )
        self._profiles: Dict[int, CovarianceProfile] = {}
        self._stats: Dict[int, BlockStats] = {}
        self._sums: Dict[int, Tuple[Optional[float], BlockSumSet]] = {}
        self._has_profile: Optional[bool] = None

    @property
    def n_grid(self) -> List[int]:
        return self.config.n_grid

    @property
    def closed_form(self) -> bool:
        """True when distributional quantities use Gaussian closed forms."""
        return self.analytic and self.family.is_gaussian

    def scheme(self, n: int) -> BlockScheme:
        return make_block_scheme(n, self.config.block_rule)

    def profile(self, n: int) -> CovarianceProfile:
        """Analytic profile at n (raises UnknownAnalyticError if there is none)."""
        if n not in self._profiles:
            self._profiles[n] = analytic_profile(self.spec, n)
        return self._profiles[n]

    @property
    def has_profile(self) -> bool:
        if self._has_profile is None:
            try:
                self.profile(self.n_grid[0])
                self._has_profile = True
            except UnknownAnalyticError as e:
                logger.info("No analytic covariance for %s: %s", self.spec.label(), e)
                self._has_profile = False
        return self._has_profile

    @property
    def covariance_source(self) -> str:
        if self.config.mode != "empirical" and self.has_profile:
            return "analytic"
        return "empirical"

    def stats(self, n: int) -> BlockStats:
        if n not in self._stats:
            if self.covariance_source == "analytic":
                self._stats[n] = block_stats(self.profile(n), self.scheme(n))
            else:
                self._stats[n] = block_stats_from_sums(self.sums(n))
        return self._stats[n]

    def s_n2(self, n: int) -> float:
        return require_positive(self.stats(n).s_n_sq)

    def sums(self, n: int, threshold: Optional[float] = None) -> BlockSumSet:
        """
        Simulated block sums at n, optionally with truncated moments at ``threshold``.

        Block sums do not depend on the threshold, so a cached set is reused
        whenever it already carries the requested truncation.
        """
        cached = self._sums.get(n)
        if cached is not None and (threshold is None or cached[0] == threshold):
            return cached[1]
        config = self.config
        logger.info("Simulating %d replicates at n=%d", config.reps, n)
        sums = simulate_block_sums(
            self.spec,
            self.scheme(n),
            config.reps,
            config.seed,
            workers=config.workers,
            chunk_size=config.chunk_size,
            lindeberg_threshold=threshold,
        )
        self._sums[n] = (threshold, sums)
        return sums
