"""Shared domain types, blocking arithmetic and configuration."""

from .config import (
    apply_overrides,
    build_config,
    config_hash,
    dump_config,
    list_family_aliases,
    load_config,
    parse_family,
    parse_n_grid,
)
from .exceptions import (
    AssocCLTError,
    AssociationViolationError,
    ConfigError,
    CovarianceNotPSDError,
    DegenerateVarianceError,
    InvalidSchemeError,
    PreconditionError,
    ReportWriteError,
    UnknownAnalyticError,
    UnknownComponentError,
)
from .models import (
    BlockStats,
    BlockSumSet,
    CFGap,
    CFPoint,
    CltVerdict,
    CompositeReport,
    ConditionReport,
    ConditionValue,
    CovarianceProfile,
    CovarianceReport,
    DecompositionBound,
    EvaluatorFailure,
    ExperimentConfig,
    FamilySpec,
    LongRunVariance,
    NewmanCheck,
    ProbeResult,
    Provenance,
    ReplicateSet,
    SamplePath,
    SampleSummary,
    TheoremReport,
    Tolerances,
    Violation,
)
from .scheme import BlockRule, BlockScheme, make_block_scheme, parse_block_rule
from .validation import validate_family

__all__ = [
    "apply_overrides", "build_config", "config_hash", "dump_config", "list_family_aliases",
    "load_config", "parse_family", "parse_n_grid",
    "AssocCLTError", "AssociationViolationError", "ConfigError", "CovarianceNotPSDError",
    "DegenerateVarianceError", "InvalidSchemeError", "PreconditionError", "ReportWriteError",
    "UnknownAnalyticError", "UnknownComponentError",
    "BlockStats", "BlockSumSet", "CFGap", "CFPoint", "CltVerdict", "CompositeReport",
    "ConditionReport", "ConditionValue", "CovarianceProfile", "CovarianceReport",
    "DecompositionBound", "EvaluatorFailure", "ExperimentConfig", "FamilySpec", "LongRunVariance",
    "NewmanCheck", "ProbeResult", "Provenance", "ReplicateSet", "SamplePath", "SampleSummary",
    "TheoremReport", "Tolerances", "Violation",
    "BlockRule", "BlockScheme", "make_block_scheme", "parse_block_rule",
    "validate_family",
]
