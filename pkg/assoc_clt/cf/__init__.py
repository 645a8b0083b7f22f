"""Empirical characteristic functions and block factorization gaps."""

from .ecf import MIN_ECF_SAMPLES, ecf
from .gaps import (
    MIN_GAP_REPS,
    analytic_block_gap,
    analytic_full_block_gap,
    analytic_product_limit,
    analytic_truncation_gap,
    cf_block_gap,
    cf_full_block_gap,
    cf_product_limit,
    cf_truncation_gap,
    full_block_bound,
    gaussian_joint_cf_gap,
    newman_cf_bound,
    newman_gap_bound,
)

__all__ = [
    "MIN_ECF_SAMPLES", "ecf",
    "MIN_GAP_REPS", "analytic_block_gap", "analytic_full_block_gap", "analytic_product_limit",
    "analytic_truncation_gap", "cf_block_gap", "cf_full_block_gap", "cf_product_limit",
    "cf_truncation_gap", "full_block_bound", "gaussian_joint_cf_gap", "newman_cf_bound",
    "newman_gap_bound",
]
