"""Covariance profiles, Cox coefficients and association diagnostics."""

from .battery import MonotonePair, MonotoneTestBattery, default_battery, lemma_battery
from .lemmas import hoeffding_copies_cov, hoeffding_cov, newman_functional_check, sample_cov
from .probes import association_probe, demimartingale_probe
from .profile import (
    analytic_profile,
    cox_coefficient,
    cox_coefficient_limit,
    empirical_profile,
    long_run_variance,
    require_positive,
    s_n_squared,
    stationary_ratio,
    summarize_profile,
)

__all__ = [
    "MonotonePair", "MonotoneTestBattery", "default_battery", "lemma_battery",
    "hoeffding_copies_cov", "hoeffding_cov", "newman_functional_check", "sample_cov",
    "association_probe", "demimartingale_probe",
    "analytic_profile", "cox_coefficient", "cox_coefficient_limit", "empirical_profile",
    "long_run_variance", "require_positive", "s_n_squared", "stationary_ratio",
    "summarize_profile",
]
