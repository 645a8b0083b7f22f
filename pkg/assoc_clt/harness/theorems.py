"""
Theorem-level reports: hypotheses over the grid, a CLT run, and whether they agree.

A theorem's requirements are groups of condition ids. Every group is
required and any member of a group suffices. Disagreement between the
hypotheses and the CLT outcome is reported, never raised.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence

from .. import __version__
from ..blocking.composite import (
    check_cox,
    check_oliveira_A,
    check_oliveira_B,
    evaluate_trajectory,
)
from ..blocking.conditions import eval_decomposition_bound
from ..blocking.context import GridContext
from ..cf.gaps import (
    analytic_block_gap,
    analytic_full_block_gap,
    analytic_product_limit,
    analytic_truncation_gap,
    cf_block_gap,
    cf_full_block_gap,
    cf_product_limit,
    cf_truncation_gap,
)
from ..core.config import config_hash
from ..core.exceptions import PreconditionError, UnknownComponentError
from ..core.models import (
    CFGap,
    CltVerdict,
    CompositeReport,
    ConditionReport,
    Consistency,
    EvaluatorFailure,
    ExperimentConfig,
    Provenance,
    TheoremReport,
)
from ..utils.helpers import calculate_verdict
from .clt import run_clt

logger = logging.getLogger(__name__)

REQUIREMENTS: Dict[str, List[List[str]]] = {
    "T1_stationary": [["sigma2_finite"], ["stationary_ratio"]],
    "T1_general": [["H0"], ["Ha"], ["Hb"], ["Hc"]],
    "T2": [["Ha"], ["Hab", "Hb"], ["Lindeberg_nu"]],
    "T3": [["C2gap"], ["Lindeberg_nu"]],
    "Cox": [["coxA1_var"], ["coxA1_third"], ["coxA2_r"], ["coxA2_u1"]],
    "OliveiraA": [["A1"], ["A2"], ["A3"]],
    "OliveiraB": [["B1_u_n"], ["B1_u1"], ["B2"], ["B3"]],
    "GapDemo": [["B1_u_n"], ["B1_u1"], ["B2"], ["B3"]],
}

# Reported next to the requirements without entering the verdict.
COMPANIONS: Dict[str, List[str]] = {
    "T2": ["FellerMax"],
    "T3": ["FellerMax", "FullBlockGap"],
    "GapDemo": ["Hab", "HNab", "B2S"],
}

_COMPOSITE_CHECKS: Dict[str, Callable[[GridContext], CompositeReport]] = {
    "Cox": check_cox,
    "OliveiraA": check_oliveira_A,
    "OliveiraB": check_oliveira_B,
    "GapDemo": check_oliveira_B,
}

CONSISTENCY_RULES = {
    "consistent": [("decided", "eq", True), ("agree", "eq", True)],
    "conditions_hold_clt_fails": [("decided", "eq", True), ("conditions_hold", "eq", True)],
    "conditions_fail_clt_passes": [("decided", "eq", True), ("clt_passed", "eq", True)],
    "inconclusive": "default",
}


def list_theorems() -> List[str]:
    return list(REQUIREMENTS)


def conditions_hold(
    groups: Sequence[Sequence[str]], reports: Sequence[ConditionReport]
) -> Optional[bool]:
    """
    True if every group has a member that holds, False if some group has
    only failing members, None otherwise (including missing reports).
    """
    verdicts = {r.condition_id: r.verdict for r in reports}
    decided = True
    for group in groups:
        members = [verdicts.get(c) for c in group]
        if "holds_empirically" in members:
            continue
        if all(v == "fails_empirically" for v in members):
            return False
        decided = False
    return True if decided else None


def consistency_flag(hold: Optional[bool], clt: Optional[CltVerdict]) -> Consistency:
    metrics = {
        "decided": hold is not None and clt is not None,
        "conditions_hold": hold,
        "clt_passed": clt.passed if clt is not None else None,
        "agree": clt is not None and hold == clt.passed,
    }
    return calculate_verdict(metrics, CONSISTENCY_RULES)  # type: ignore[return-value]


def clt_length(config: ExperimentConfig) -> int:
    """
    Largest grid point whose reps * n fits in the sample budget.

    Raises:
        PreconditionError: If no grid point fits and the budget is not lifted
    """
    if config.allow_large_budget:
        return config.n_max
    fitting = [n for n in config.n_grid if n * config.reps <= config.sample_budget]
    if not fitting:
        raise PreconditionError(
            f"no grid point fits reps * n <= {config.sample_budget} with reps = {config.reps}"
        )
    if fitting[-1] != config.n_max:
        logger.warning("CLT run at n=%d instead of n_max=%d (sample budget)", fitting[-1], config.n_max)
    return fitting[-1]


def _clt_normalizer(theorem_id: str, ctx: GridContext) -> str:
    if theorem_id == "T1_stationary":
        lrv = ctx.family.long_run_variance()
        if lrv.finite:
            return "stationary_sigma_sqrt_n"
    if ctx.covariance_source == "analytic":
        return "analytic_s_n"
    return "empirical_s_n"


def cf_gaps(ctx: GridContext, n: int) -> Dict[str, List[CFGap]]:
    """Every characteristic-function gap at n, in closed form for Gaussian families."""
    t_grid = ctx.config.t_grid
    stats = ctx.stats(n)
    if ctx.closed_form:
        tol = ctx.tolerances.analytic_tol
        return {
            "block": analytic_block_gap(stats, t_grid, tol),
            "full_block": analytic_full_block_gap(stats, t_grid, tol),
            "product_limit": analytic_product_limit(stats, t_grid),
            "truncation": analytic_truncation_gap(stats, t_grid, tol),
        }
    sums = ctx.sums(n)
    return {
        "block": cf_block_gap(sums, t_grid, stats=stats),
        "full_block": cf_full_block_gap(sums, t_grid, stats=stats),
        "product_limit": cf_product_limit(sums, t_grid, stats=stats),
        "truncation": cf_truncation_gap(sums, t_grid, stats=stats),
    }


def _record(failures: List[EvaluatorFailure], name: str, error: Exception) -> None:
    logger.warning("%s failed: %s: %s", name, type(error).__name__, error)
    failures.append(
        EvaluatorFailure(evaluator=name, error_type=type(error).__name__, message=str(error))
    )


def run_theorem(
    theorem_id: str,
    config: ExperimentConfig,
    overrides: Sequence[str] = (),
    run_clt_check: bool = True,
) -> TheoremReport:
    """
    Evaluate a theorem's hypotheses over config.n_grid and run the CLT check.

    Args:
        theorem_id: One of list_theorems()
        config: Experiment configuration
        overrides: Overrides applied to the configuration (kept in the provenance)
        run_clt_check: Skip the Monte Carlo CLT run when False

    Returns:
        TheoremReport; ``incomplete`` is set when an evaluator failed

    Raises:
        UnknownComponentError: For an unknown theorem id
    """
    if theorem_id not in REQUIREMENTS:
        raise UnknownComponentError("theorem", theorem_id, list_theorems())
    logger.info("Theorem %s on %s", theorem_id, config.family.label())
    ctx = GridContext(config)
    groups = REQUIREMENTS[theorem_id]
    failures: List[EvaluatorFailure] = []
    extras: Dict[str, object] = {}

    if theorem_id in _COMPOSITE_CHECKS:
        composite = _COMPOSITE_CHECKS[theorem_id](ctx)
        reports = list(composite.reports)
        failures.extend(composite.failures)
        extras.update(composite.extras)
    else:
        reports = []
        for condition_id in dict.fromkeys(c for group in groups for c in group):
            report = evaluate_trajectory(ctx, condition_id, failures)
            if report is not None:
                reports.append(report)

    present = {r.condition_id for r in reports}
    for condition_id in COMPANIONS.get(theorem_id, []):
        if condition_id in present:
            continue
        report = evaluate_trajectory(ctx, condition_id, failures)
        if report is not None:
            reports.append(report)

    if theorem_id == "GapDemo":
        try:
            extras["decomposition_bound"] = [
                eval_decomposition_bound(
                    ctx.profile(n), ctx.scheme(n), ctx.stats(n), ctx.tolerances.analytic_tol
                ).model_dump(mode="json")
                for n in ctx.n_grid
            ]
        except Exception as e:
            _record(failures, "decomposition_bound", e)

    cf: Dict[str, List[CFGap]] = {}
    if theorem_id in ("T3", "OliveiraA"):
        try:
            cf = cf_gaps(ctx, ctx.n_grid[-1])
        except Exception as e:
            _record(failures, "cf_gaps", e)

    clt = None
    if run_clt_check:
        try:
            clt = run_clt(
                config.family,
                clt_length(config),
                config.reps,
                config.seed,
                normalizer=_clt_normalizer(theorem_id, ctx),
                workers=config.workers,
                chunk_size=config.chunk_size,
                alpha=config.tolerances.ks_alpha,
                sample_budget=config.sample_budget,
                allow_large=config.allow_large_budget,
            )
        except Exception as e:
            _record(failures, "clt", e)

    hold = conditions_hold(groups, reports)
    consistency = consistency_flag(hold, clt)
    if consistency in ("conditions_hold_clt_fails", "conditions_fail_clt_passes"):
        logger.warning("Theorem %s on %s: %s", theorem_id, config.family.label(), consistency)

    return TheoremReport(
        theorem_id=theorem_id,  # type: ignore[arg-type]
        family=config.family,
        requirements={" | ".join(group): list(group) for group in groups},
        conditions=reports,
        cf=cf,
        extras=extras,
        clt=clt,
        conditions_hold=hold,
        consistency=consistency,
        incomplete=bool(failures),
        failures=failures,
        provenance=make_provenance(config, overrides),
    )


def make_provenance(config: ExperimentConfig, overrides: Sequence[str] = ()) -> Provenance:
    return Provenance(
        version=__version__,
        config_hash=config_hash(config),
        master_seed=config.seed,
        overrides=list(overrides),
    )
