"""Block statistics, hypothesis evaluators and trend verdicts."""

from .composite import (
    block_gaps,
    check_conditions,
    check_cox,
    check_oliveira_A,
    check_oliveira_B,
    evaluate_trajectory,
    full_block_gaps,
    list_conditions,
)
from .conditions import (
    analytic_Hc,
    analytic_lindeberg_blocks,
    analytic_lindeberg_variables,
    cox_lindeberg_bound,
    empirical_Hc,
    eval_B2S,
    eval_decomposition_bound,
    eval_feller_max,
    eval_H0,
    eval_Ha,
    eval_Hab,
    eval_Hb,
    eval_Hc,
    eval_HNab,
    eval_HNab_worst,
    eval_lindeberg_blocks,
    eval_lindeberg_variables,
)
from .context import GridContext
from .stats import block_stats, block_stats_from_sums, cross_block_mass
from .verdict import judge_trajectory, trend_slope

__all__ = [
    "block_gaps", "check_conditions", "check_cox", "check_oliveira_A", "check_oliveira_B",
    "evaluate_trajectory", "full_block_gaps", "list_conditions",
    "analytic_Hc", "analytic_lindeberg_blocks", "analytic_lindeberg_variables",
    "cox_lindeberg_bound", "empirical_Hc", "eval_B2S", "eval_decomposition_bound",
    "eval_feller_max", "eval_H0", "eval_Ha", "eval_Hab", "eval_Hb", "eval_Hc", "eval_HNab",
    "eval_HNab_worst", "eval_lindeberg_blocks", "eval_lindeberg_variables",
    "GridContext",
    "block_stats", "block_stats_from_sums", "cross_block_mass",
    "judge_trajectory", "trend_slope",
]
