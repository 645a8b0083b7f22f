"""
Data models for assoc-clt.

All data structures are defined using Pydantic for validation and serialization.
Domain types are frozen; arrays are stored read-only.
"""

import hashlib
import json
from typing import Any, Dict, Iterator, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import InvalidSchemeError
from .scheme import BlockRule, BlockScheme, make_block_scheme

FamilyKind = Literal[
    "iid",
    "gaussian_cov",
    "monotone_transform",
    "moving_average",
    "common_factor",
    "markov_two_state",
]
Verdict = Literal["holds_empirically", "fails_empirically", "inconclusive"]
VerdictRule = Literal["limit", "bounded_below", "bounded_above"]
Consistency = Literal[
    "consistent", "conditions_hold_clt_fails", "conditions_fail_clt_passes", "inconclusive"
]
TheoremId = Literal[
    "T1_stationary", "T1_general", "T2", "T3", "Cox", "OliveiraA", "OliveiraB", "GapDemo"
]

MAX_SEED = 2**64 - 1
REPORT_SCHEMA = "assoc-clt/report/1"


def _frozen_array(value: Any, dtype: Any = float) -> np.ndarray:
    arr = np.array(value, dtype=dtype)
    arr.setflags(write=False)
    return arr


def canonical_json(data: Any) -> str:
    """Canonical JSON text (sorted keys, no whitespace) used for hashing."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Families and sample paths
# ---------------------------------------------------------------------------


class FamilySpec(BaseModel):
    """Declarative description of an associated family."""

    model_config = ConfigDict(frozen=True)

    kind: FamilyKind = Field(..., description="Family kind")
    params: Dict[str, Any] = Field(default_factory=dict, description="Kind-specific parameters")
    centered: bool = Field(default=True, description="Marginals are asserted mean-zero")

    def family_hash(self) -> str:
        """Short SHA-256 digest of the canonical JSON form."""
        digest = hashlib.sha256(canonical_json(self.model_dump(mode="json")).encode())
        return digest.hexdigest()[:16]

    def label(self) -> str:
        inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params) if k != "base")
        return f"{self.kind}({inner})" if inner else self.kind


class Violation(BaseModel):
    """A single violated family constraint."""

    constraint: str = Field(..., description="Name of the violated constraint")
    parameter: str = Field(..., description="Offending parameter")
    detail: str = Field(default="", description="Human-readable explanation")
    value: Optional[str] = Field(default=None, description="Offending identifier, if any")


class SamplePath(BaseModel):
    """One realized sequence X_1..X_n."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1, description="Sequence length")
    values: np.ndarray = Field(..., description="Realized values, shape (n,)")
    family: FamilySpec = Field(..., description="Generating family")
    seed: int = Field(..., ge=0, le=MAX_SEED, description="Seed the path was drawn with")

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return _frozen_array(v)

    @model_validator(mode="after")
    def _check_values(self) -> "SamplePath":
        if self.values.shape != (self.n,):
            raise ValueError(f"values must have shape ({self.n},), got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")
        return self


class ReplicateSet(BaseModel):
    """
    Seeded collection of independent realizations.

    Paths are stored as rows of ``values``; ``seeds[i]`` is the seed derived
    from (master_seed, i) that reproduces row i.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: FamilySpec = Field(..., description="Family shared by every path")
    n: int = Field(..., ge=1, description="Path length")
    master_seed: int = Field(..., ge=0, le=MAX_SEED, description="Master seed")
    seeds: List[int] = Field(..., description="Per-path derived seeds")
    values: np.ndarray = Field(..., description="Paths, shape (reps, n)")
    label: Optional[str] = Field(default=None, description="Free-form tag for built-in inputs")

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return _frozen_array(v)

    @model_validator(mode="after")
    def _check_shape(self) -> "ReplicateSet":
        if self.values.ndim != 2 or self.values.shape[1] != self.n:
            raise ValueError(f"values must have shape (reps, {self.n}), got {self.values.shape}")
        if self.values.shape[0] != len(self.seeds) or not self.seeds:
            raise ValueError("need one seed per path and at least one path")
        return self

    @property
    def reps(self) -> int:
        return int(self.values.shape[0])

    @property
    def paths(self) -> List[SamplePath]:
        return list(self.iter_paths())

    def iter_paths(self) -> Iterator[SamplePath]:
        for seed, row in zip(self.seeds, self.values):
            yield SamplePath(n=self.n, values=row, family=self.family, seed=seed)

    def totals(self) -> np.ndarray:
        """S_n for every path."""
        return self.values.sum(axis=1)


class BlockSumSet(BaseModel):
    """
    Per-replicate block sums of a blocking scheme.

    Produced by streaming simulation or by reducing a ReplicateSet; every
    Monte Carlo block evaluator consumes this instead of raw paths.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: FamilySpec
    scheme: BlockScheme
    master_seed: int = Field(..., ge=0, le=MAX_SEED)
    block_sums: np.ndarray = Field(..., description="Full block sums, shape (reps, m)")
    tail_sums: np.ndarray = Field(..., description="Tail sums S_n - S_ml, shape (reps,)")
    lindeberg_threshold: Optional[float] = Field(
        default=None, description="Threshold a of the per-variable truncated moments"
    )
    truncated_sq: Optional[np.ndarray] = Field(
        default=None, description="Per-replicate sum_i X_i^2 1{|X_i| >= a}"
    )

    @field_validator("block_sums", "tail_sums", "truncated_sq", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> Optional[np.ndarray]:
        return None if v is None else _frozen_array(v)

    @model_validator(mode="after")
    def _check_shape(self) -> "BlockSumSet":
        if self.block_sums.shape[1:] != (self.scheme.m,):
            raise ValueError(f"block_sums must have {self.scheme.m} columns")
        if self.tail_sums.shape != (self.block_sums.shape[0],):
            raise ValueError("tail_sums must have one entry per replicate")
        return self

    @property
    def reps(self) -> int:
        return int(self.block_sums.shape[0])

    def partial_totals(self) -> np.ndarray:
        """S_ml for every replicate."""
        return self.block_sums.sum(axis=1)

    def totals(self) -> np.ndarray:
        """S_n for every replicate."""
        return self.partial_totals() + self.tail_sums


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


class Tolerances(BaseModel):
    """Numerical tolerances and decision thresholds."""

    model_config = ConfigDict(frozen=True)

    limit_tol: float = Field(default=0.05, gt=0.0, description="Limit verdict tolerance")
    analytic_tol: float = Field(default=1e-10, gt=0.0, description="Exact-arithmetic tolerance")
    ks_alpha: float = Field(default=0.05, gt=0.0, lt=1.0, description="KS test level")
    trend_tol: float = Field(
        default=0.1, gt=0.0, description="Log-log slope above -trend_tol counts as flat"
    )


def _default_n_grid() -> List[int]:
    return [2**k for k in range(8, 17)]


def _default_t_grid() -> List[float]:
    return [-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0]


class ExperimentConfig(BaseModel):
    """Full experiment description. Loaded from JSON, overridable from the CLI."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: FamilySpec = Field(..., description="Family under study")
    block_rule: BlockRule = Field(default_factory=BlockRule, description="Block length schedule")
    n_grid: List[int] = Field(default_factory=_default_n_grid, description="Sequence lengths")
    reps: int = Field(default=5000, ge=1, description="Monte Carlo replicates")
    delta: float = Field(default=1.0, gt=0.0, description="Lyapounov moment exponent")
    epsilon: float = Field(default=0.1, gt=0.0, description="Lindeberg truncation level")
    seed: int = Field(default=0, ge=0, le=MAX_SEED, description="Master seed")
    tolerances: Tolerances = Field(default_factory=Tolerances)
    hc_literal: bool = Field(default=False, description="Use the l^(3/2) prefactor for any delta")
    t_grid: List[float] = Field(default_factory=_default_t_grid, description="CF arguments")
    mode: Literal["auto", "analytic", "empirical"] = Field(
        default="auto", description="auto = closed forms for Gaussian families"
    )
    workers: int = Field(default=1, ge=1, description="Concurrent generation tasks")
    chunk_size: int = Field(default=256, ge=1, description="Replicates per generation task")
    sample_budget: int = Field(default=10**9, ge=1, description="Max reps*n for one CLT run")
    allow_large_budget: bool = Field(default=False, description="Lift the sample budget")

    @field_validator("n_grid")
    @classmethod
    def _check_grid(cls, grid: List[int]) -> List[int]:
        if not grid:
            raise ValueError("n_grid must not be empty")
        if any(n < 1 for n in grid):
            raise ValueError("n_grid entries must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"n_grid must be strictly increasing, got {grid}")
        return grid

    @field_validator("t_grid")
    @classmethod
    def _check_t_grid(cls, grid: List[float]) -> List[float]:
        if not all(np.isfinite(grid)):
            raise ValueError("t_grid entries must be finite")
        return grid

    @model_validator(mode="after")
    def _check_schemes(self) -> "ExperimentConfig":
        for n in self.n_grid:
            try:
                make_block_scheme(n, self.block_rule)
            except InvalidSchemeError as e:
                raise ValueError(f"block rule invalid at n = {n}: {e}") from e
        return self

    @property
    def n_max(self) -> int:
        return self.n_grid[-1]

    def schemes(self) -> List[BlockScheme]:
        return [make_block_scheme(n, self.block_rule) for n in self.n_grid]


# ---------------------------------------------------------------------------
# Covariance
# ---------------------------------------------------------------------------


class CovarianceProfile(BaseModel):
    """
    Analytic or empirical covariance structure of X_1..X_n.

    ``gamma`` is either a stationary autocovariance vector (length n) or a
    full symmetric n x n matrix.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    source: Literal["analytic", "empirical"] = Field(..., description="Where gamma came from")
    family: Optional[FamilySpec] = Field(default=None, description="Family of analytic profiles")
    reps: Optional[int] = Field(default=None, description="Replicates behind empirical profiles")
    gamma: np.ndarray = Field(..., description="Autocovariance vector or covariance matrix")
    stderr: Optional[np.ndarray] = Field(default=None, description="Per-entry standard errors")

    @field_validator("gamma", "stderr", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> Optional[np.ndarray]:
        return None if v is None else _frozen_array(v)

    @model_validator(mode="after")
    def _check_gamma(self) -> "CovarianceProfile":
        g = self.gamma
        if g.ndim == 1:
            if g.shape != (self.n,):
                raise ValueError(f"stationary gamma must have length {self.n}")
            diag = g[:1]
        elif g.ndim == 2:
            if g.shape != (self.n, self.n):
                raise ValueError(f"gamma matrix must be {self.n}x{self.n}")
            if not np.allclose(g, g.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(g).max()))):
                raise ValueError("gamma matrix must be symmetric")
            diag = np.diag(g)
        else:
            raise ValueError("gamma must be a vector or a matrix")
        if not np.all(np.isfinite(g)):
            raise ValueError("gamma must be finite")
        if np.any(diag < 0):
            raise ValueError("variances must be nonnegative")
        return self

    @property
    def is_stationary(self) -> bool:
        return self.gamma.ndim == 1

    def matrix(self) -> np.ndarray:
        """Full n x n covariance matrix."""
        if self.is_stationary:
            from scipy.linalg import toeplitz

            return toeplitz(self.gamma)
        return np.array(self.gamma)

    def variances(self) -> np.ndarray:
        if self.is_stationary:
            return np.full(self.n, float(self.gamma[0]))
        return np.diag(self.gamma).copy()

    def window_sum(self, start: int, stop: int) -> float:
        """Var(X_start + ... + X_{stop-1}) for 0-based half-open [start, stop)."""
        if not 0 <= start <= stop <= self.n:
            raise IndexError(f"window [{start}, {stop}) outside 0..{self.n}")
        length = stop - start
        if length == 0:
            return 0.0
        if self.is_stationary:
            lags = np.arange(1, length)
            return float(length * self.gamma[0] + 2.0 * np.sum((length - lags) * self.gamma[1:length]))
        return float(self.gamma[start:stop, start:stop].sum())

    def total(self) -> float:
        """s_n^2 = Var(S_n)."""
        return self.window_sum(0, self.n)


class LongRunVariance(BaseModel):
    """sigma^2 = Var(X_1) + 2 sum_{j>=2} Cov(X_1, X_j)."""

    model_config = ConfigDict(frozen=True)

    sigma2: float = Field(..., description="Long-run variance (inf when divergent)")
    finite: bool = Field(..., description="False when the autocovariance series diverges")
    method: Literal["closed_form", "partial_sum", "divergent"] = Field(...)
    terms: int = Field(default=0, description="Terms summed by the partial-sum method")
    remainder_bound: float = Field(default=0.0, description="Bound on the neglected tail")


class NewmanCheck(BaseModel):
    """|Cov(f(X), g(Y))| against ||f'|| ||g'|| Cov(X, Y) on a sample."""

    model_config = ConfigDict(frozen=True)

    pair: str
    lhs: float
    rhs: float
    bound: float = Field(..., description="||f'||_inf * ||g'||_inf")
    stderr: float = Field(..., ge=0.0, description="Combined standard error of lhs and rhs")
    holds: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


class ProbeResult(BaseModel):
    """Smallest standardized covariance found by an association or demimartingale probe."""

    model_config = ConfigDict(frozen=True)

    probe: Literal["association", "demimartingale"]
    min_value: float
    min_stderr: float
    argmin: str = Field(..., description="Statistic that attained the minimum")
    evaluated: int = Field(..., description="Number of statistics evaluated")
    flag: bool = Field(..., description="True iff some value < -3 stderr")


class CovarianceReport(BaseModel):
    """Summary emitted by the ``analyze`` command."""

    n: int
    source: Literal["analytic", "empirical"]
    family: FamilySpec
    s_n2: float
    sigma2: Optional[float] = Field(default=None, description="Long-run variance (None if divergent)")
    sigma2_finite: bool = True
    stationary_ratio: Optional[float] = None
    u: List[List[float]] = Field(default_factory=list, description="(r, u(r)) on the finite window")
    u_limit: List[List[float]] = Field(
        default_factory=list, description="(r, u(r)) over the infinite sequence"
    )
    probes: List[ProbeResult] = Field(default_factory=list)


# ---------------------------------------------------------------------------
# Blocking and conditions
# ---------------------------------------------------------------------------


class BlockStats(BaseModel):
    """
    Block variances of a scheme.

    Attributes:
        tau_sq: tau_j^2 = Var(S_jl - S_(j-1)l), j = 1..m
        tail_var: Var(X_ml+1 + ... + X_n)
        s_ml_sq: Var(S_ml)
        s_n_sq: Var(S_n)
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scheme: BlockScheme
    tau_sq: np.ndarray
    tail_var: float = Field(..., ge=0.0)
    s_ml_sq: float
    s_n_sq: float
    source: Literal["analytic", "empirical"]
    tau_sq_stderr: Optional[np.ndarray] = None

    @field_validator("tau_sq", "tau_sq_stderr", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> Optional[np.ndarray]:
        return None if v is None else _frozen_array(v)

    @model_validator(mode="after")
    def _check(self) -> "BlockStats":
        if self.tau_sq.shape != (self.scheme.m,):
            raise ValueError(f"tau_sq must have {self.scheme.m} entries")
        if np.any(self.tau_sq < 0):
            raise ValueError("block variances must be nonnegative")
        return self

    @property
    def nu_sq(self) -> float:
        """nu^2 = sum_j tau_j^2."""
        return float(np.sum(self.tau_sq))

    @property
    def cross_block_mass(self) -> float:
        """Sum of Cov(X_i, X_k) over ordered pairs lying in different blocks (tail included)."""
        return self.s_n_sq - self.nu_sq - self.tail_var


class ConditionValue(BaseModel):
    """One grid point of a condition trajectory."""

    model_config = ConfigDict(frozen=True)

    condition_id: str
    n: int = Field(..., ge=1)
    value: float
    target: float = Field(default=0.0)
    r: Optional[int] = Field(default=None, description="Lag, for trajectories indexed by r")
    stderr: Optional[float] = Field(default=None)
    flags: List[str] = Field(default_factory=list)

    @field_validator("value")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not np.isfinite(v):
            raise ValueError("condition value must be finite")
        return v

    @property
    def distance(self) -> float:
        return abs(self.value - self.target)


class ConditionReport(BaseModel):
    """Trajectory of one condition over a grid, with its trend verdict."""

    model_config = ConfigDict(frozen=True)

    condition_id: str
    axis: Literal["n", "r"] = "n"
    rule: VerdictRule = "limit"
    grid: List[ConditionValue]
    verdict: Verdict
    thresholds: Dict[str, float] = Field(default_factory=dict)
    trend_slope: Optional[float] = None
    source: str = "analytic"
    note: Optional[str] = None

    @property
    def holds(self) -> bool:
        return self.verdict == "holds_empirically"

    @property
    def last(self) -> ConditionValue:
        return self.grid[-1]


class DecompositionBound(BaseModel):
    """|1 - nu^2/s_n^2 - tail/s_n^2| against (2/s_n^2) sum_{i<=l} u(i)."""

    model_config = ConfigDict(frozen=True)

    n: int
    lhs: float
    rhs: float
    holds: bool


class EvaluatorFailure(BaseModel):
    """An evaluator that raised while a report was being assembled."""

    evaluator: str
    error_type: str
    message: str


class CompositeReport(BaseModel):
    """Several condition reports under one theorem hypothesis."""

    name: str
    reports: List[ConditionReport] = Field(default_factory=list)
    extras: Dict[str, Any] = Field(default_factory=dict)
    failures: List[EvaluatorFailure] = Field(default_factory=list)

    @property
    def verdict(self) -> Verdict:
        if not self.reports:
            return "inconclusive"
        if any(r.verdict == "fails_empirically" for r in self.reports):
            return "fails_empirically"
        if all(r.holds for r in self.reports) and not self.failures:
            return "holds_empirically"
        return "inconclusive"

    def get(self, condition_id: str) -> ConditionReport:
        for report in self.reports:
            if report.condition_id == condition_id:
                return report
        raise KeyError(condition_id)


# ---------------------------------------------------------------------------
# Characteristic functions
# ---------------------------------------------------------------------------


class CFPoint(BaseModel):
    """Empirical characteristic function value at t."""

    model_config = ConfigDict(frozen=True)

    t: float
    re: float
    im: float
    stderr: float = Field(..., ge=0.0, description="Half-width on the modulus")

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


class CFGap(BaseModel):
    """A characteristic-function gap at t with its bound (if any)."""

    model_config = ConfigDict(frozen=True)

    t: float
    gap: float
    stderr: float = 0.0
    bound: Optional[float] = None
    holds: Optional[bool] = None
    source: Literal["analytic", "empirical"] = "empirical"


# ---------------------------------------------------------------------------
# Harness
# ---------------------------------------------------------------------------


class SampleSummary(BaseModel):
    """Moments of the normalized sums."""

    count: int
    mean: float
    sd: float
    skewness: float
    excess_kurtosis: float


class CltVerdict(BaseModel):
    """Monte Carlo normality outcome for S_n / normalizer."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    family: FamilySpec
    n: int
    reps: int
    seed: int
    normalizer: str
    scale: float = Field(..., description="Value the sums were divided by")
    summary: SampleSummary
    ks_distance: float = Field(..., ge=0.0, le=1.0)
    ks_critical: float
    alpha: float
    passed: bool
    samples: Optional[np.ndarray] = Field(default=None, exclude=True)


class Provenance(BaseModel):
    """Where a report came from."""

    tool: str = "assoc-clt"
    version: str
    config_hash: str
    master_seed: int
    overrides: List[str] = Field(default_factory=list)


class TheoremReport(BaseModel):
    """Conditions, CLT verdict and their consistency for one theorem."""

    schema_version: str = Field(default=REPORT_SCHEMA, alias="schema")
    theorem_id: TheoremId
    family: FamilySpec
    requirements: Dict[str, List[str]] = Field(
        default_factory=dict, description="Requirement groups; one member per group must hold"
    )
    conditions: List[ConditionReport] = Field(default_factory=list)
    cf: Dict[str, List[CFGap]] = Field(default_factory=dict)
    extras: Dict[str, Any] = Field(default_factory=dict)
    clt: Optional[CltVerdict] = None
    conditions_hold: Optional[bool] = None
    consistency: Consistency = "inconclusive"
    incomplete: bool = False
    failures: List[EvaluatorFailure] = Field(default_factory=list)
    provenance: Optional[Provenance] = None

    model_config = ConfigDict(populate_by_name=True)

    def condition(self, condition_id: str) -> ConditionReport:
        for report in self.conditions:
            if report.condition_id == condition_id:
                return report
        raise KeyError(condition_id)
