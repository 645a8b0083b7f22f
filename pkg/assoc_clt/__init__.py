"""
assoc-clt - Finite-n diagnostics for central limit theorems of associated sequences.

Components:
- generators: seeded associated families and replicate simulation
- covariance: covariance profiles, Cox coefficients and association checks
- blocking: block statistics, hypothesis evaluators and trend verdicts
- cf: characteristic-function gaps and their covariance bounds
- harness: Monte Carlo CLT runs and theorem reports
"""

__version__ = "0.1.0"

from assoc_clt.core import ExperimentConfig, FamilySpec, TheoremReport, load_config
from assoc_clt.generators import create_family, replicate, simulate_block_sums
from assoc_clt.harness import emit_report, run_clt, run_theorem

__all__ = [
    "ExperimentConfig",
    "FamilySpec",
    "TheoremReport",
    "load_config",
    "create_family",
    "replicate",
    "simulate_block_sums",
    "emit_report",
    "run_clt",
    "run_theorem",
]
