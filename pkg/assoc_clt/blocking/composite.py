"""
Condition registry and composite hypothesis checks.

Every condition is evaluated over the grid of a GridContext and judged by
its verdict rule. An evaluator that raises is recorded as a failure and the
remaining conditions still run.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..cf.gaps import (
    analytic_block_gap,
    analytic_full_block_gap,
    cf_block_gap,
    cf_full_block_gap,
)
from ..core.exceptions import PreconditionError, UnknownAnalyticError, UnknownComponentError
from ..core.models import (
    CFGap,
    CompositeReport,
    ConditionReport,
    ConditionValue,
    EvaluatorFailure,
    VerdictRule,
)
from ..covariance.profile import (
    cox_coefficient,
    cox_coefficient_limit,
    long_run_variance,
    stationary_ratio,
)
from .conditions import (
    analytic_lindeberg_blocks,
    analytic_lindeberg_variables,
    cox_lindeberg_bound,
    eval_B2S,
    eval_feller_max,
    eval_H0,
    eval_Ha,
    eval_Hab,
    eval_Hb,
    eval_Hc,
    eval_HNab_worst,
    eval_lindeberg_blocks,
    eval_lindeberg_variables,
)
from .context import GridContext
from .verdict import judge_trajectory

logger = logging.getLogger(__name__)

Evaluator = Callable[[GridContext, int], ConditionValue]


# ---------------------------------------------------------------------------
# Per-n evaluators over a context
# ---------------------------------------------------------------------------


def _h0(ctx: GridContext, n: int) -> ConditionValue:
    if ctx.covariance_source == "analytic":
        return eval_H0(ctx.profile(n), ctx.scheme(n))
    return ConditionValue(condition_id="H0", n=n, value=ctx.scheme(n).ell / ctx.s_n2(n))


def _hc(ctx: GridContext, n: int) -> ConditionValue:
    config = ctx.config
    return eval_Hc(
        ctx.family,
        ctx.scheme(n),
        config.delta,
        stats=ctx.stats(n),
        sums=None if ctx.closed_form else ctx.sums(n),
        hc_literal=config.hc_literal,
        analytic=ctx.analytic,
    )


def _lindeberg(normalizer: str) -> Evaluator:
    def evaluate(ctx: GridContext, n: int) -> ConditionValue:
        if ctx.closed_form:
            return analytic_lindeberg_blocks(ctx.stats(n), ctx.config.epsilon, normalizer)  # type: ignore[arg-type]
        return eval_lindeberg_blocks(
            ctx.sums(n), ctx.config.epsilon, normalizer, stats=ctx.stats(n)  # type: ignore[arg-type]
        )

    return evaluate


def _worst_gap(condition_id: str, n: int, gaps: Sequence[CFGap]) -> ConditionValue:
    informative = [g for g in gaps if g.t != 0] or list(gaps)
    worst = max(informative, key=lambda g: g.gap)
    flags = [] if all(g.holds is not False for g in gaps) else ["bound_violated"]
    return ConditionValue(
        condition_id=condition_id,
        n=n,
        value=worst.gap,
        stderr=worst.stderr if worst.source == "empirical" else None,
        flags=flags,
    )


def block_gaps(ctx: GridContext, n: int) -> List[CFGap]:
    """Gap between S_ml / s_n and the product of the m block characteristic functions."""
    if ctx.closed_form:
        return analytic_block_gap(ctx.stats(n), ctx.config.t_grid, ctx.tolerances.analytic_tol)
    return cf_block_gap(ctx.sums(n), ctx.config.t_grid, stats=ctx.stats(n))


def full_block_gaps(ctx: GridContext, n: int) -> List[CFGap]:
    """Gap between S_n / s_n and the product over the m+1 blocks."""
    if ctx.closed_form:
        return analytic_full_block_gap(
            ctx.stats(n), ctx.config.t_grid, ctx.tolerances.analytic_tol
        )
    return cf_full_block_gap(ctx.sums(n), ctx.config.t_grid, stats=ctx.stats(n))


def _variable_lindeberg(ctx: GridContext, n: int) -> ConditionValue:
    eps, s_n2 = ctx.config.epsilon, ctx.s_n2(n)
    if ctx.config.mode != "empirical":
        try:
            return analytic_lindeberg_variables(ctx.family, n, eps, s_n2)
        except UnknownAnalyticError as e:
            logger.info("B3 at n=%d: %s; using Monte Carlo", n, e)
    sums = ctx.sums(n, threshold=eps * math.sqrt(s_n2))
    return eval_lindeberg_variables(sums, eps, s_n2)


def _relabel(condition_id: str, evaluator: Evaluator) -> Evaluator:
    def evaluate(ctx: GridContext, n: int) -> ConditionValue:
        return evaluator(ctx, n).model_copy(update={"condition_id": condition_id})

    return evaluate


def _var_over_n(ctx: GridContext, n: int) -> ConditionValue:
    return ConditionValue(condition_id="B2", n=n, value=ctx.s_n2(n) / n)


def _u_ell(ctx: GridContext, n: int) -> ConditionValue:
    ell = ctx.scheme(n).ell
    return ConditionValue(
        condition_id="B1_u_ell", n=n, r=ell, value=cox_coefficient(ctx.profile(n), ell)
    )


def _u_n(ctx: GridContext, n: int) -> ConditionValue:
    """
    u(n) over the infinite sequence.

    A divergent or unknown tail cannot be reported as a finite value, so the
    window u(l(n)) stands in for it and the point is flagged.
    """
    try:
        value = cox_coefficient_limit(ctx.spec, n)
        flag = "divergent_tail"
    except UnknownAnalyticError as e:
        logger.info("B1 at n=%d: %s; using u(l(n)) on the window", n, e)
        value, flag = math.inf, "no_closed_form"
    if math.isfinite(value):
        return ConditionValue(condition_id="B1_u_n", n=n, r=n, value=value)
    ell = ctx.scheme(n).ell
    return ConditionValue(
        condition_id="B1_u_n",
        n=n,
        r=ell,
        value=cox_coefficient(ctx.profile(n), ell),
        flags=[flag, "window_u_ell"],
    )


def _u_one(condition_id: str) -> Evaluator:
    def evaluate(ctx: GridContext, n: int) -> ConditionValue:
        return ConditionValue(condition_id=condition_id, n=n, r=1, value=cox_coefficient(ctx.profile(n), 1))

    return evaluate


def _min_variance(ctx: GridContext, n: int) -> ConditionValue:
    return ConditionValue(
        condition_id="coxA1_var", n=n, value=float(ctx.profile(n).variances().min())
    )


def _third_moment(ctx: GridContext, n: int) -> ConditionValue:
    return ConditionValue(condition_id="coxA1_third", n=n, value=ctx.family.abs_moment(3.0))


def _partial_long_run(ctx: GridContext, n: int) -> ConditionValue:
    profile = ctx.profile(n)
    if not profile.is_stationary:
        raise PreconditionError(f"{ctx.spec.label()} is not stationary")
    gamma = profile.gamma
    value = float(gamma[0] + 2.0 * gamma[1:].sum())
    return ConditionValue(condition_id="sigma2_finite", n=n, value=value)


def _stationary_ratio(ctx: GridContext, n: int) -> ConditionValue:
    ratio = stationary_ratio(ctx.profile(n), long_run_variance(ctx.spec))
    return ConditionValue(condition_id="stationary_ratio", n=n, value=ratio, target=1.0)


# condition id -> (evaluator, verdict rule, distributional)
_CONDITIONS: Dict[str, Tuple[Evaluator, VerdictRule, bool]] = {
    "H0": (_h0, "limit", False),
    "Ha": (lambda ctx, n: eval_Ha(ctx.stats(n)), "limit", False),
    "Hab": (lambda ctx, n: eval_Hab(ctx.stats(n)), "limit", False),
    "Hb": (lambda ctx, n: eval_Hb(ctx.stats(n)), "limit", False),
    "Hc": (_hc, "limit", True),
    "FellerMax": (lambda ctx, n: eval_feller_max(ctx.stats(n)), "limit", False),
    "Lindeberg_nu": (_lindeberg("nu"), "limit", True),
    "Lindeberg_s_n": (_lindeberg("s_n"), "limit", True),
    "HNab": (lambda ctx, n: eval_HNab_worst(ctx.profile(n), ctx.scheme(n)), "limit", False),
    "B2S": (lambda ctx, n: eval_B2S(ctx.profile(n), ctx.scheme(n)), "bounded_above", False),
    "C2gap": (lambda ctx, n: _worst_gap("C2gap", n, block_gaps(ctx, n)), "limit", True),
    "FullBlockGap": (
        lambda ctx, n: _worst_gap("FullBlockGap", n, full_block_gaps(ctx, n)),
        "limit",
        True,
    ),
    "A1": (_relabel("A1", lambda ctx, n: eval_Ha(ctx.stats(n))), "limit", False),
    "A2": (lambda ctx, n: _worst_gap("A2", n, full_block_gaps(ctx, n)), "limit", True),
    "A3": (_relabel("A3", _lindeberg("s_n")), "limit", True),
    "B1_u_n": (_u_n, "limit", False),
    "B1_u_ell": (_u_ell, "limit", False),
    "B1_u1": (_u_one("B1_u1"), "bounded_above", False),
    "B2": (_var_over_n, "bounded_below", False),
    "B3": (_variable_lindeberg, "limit", True),
    "coxA1_var": (_min_variance, "bounded_below", False),
    "coxA1_third": (_third_moment, "bounded_above", True),
    "coxA2_u1": (_u_one("coxA2_u1"), "bounded_above", False),
    "sigma2_finite": (_partial_long_run, "bounded_above", False),
    "stationary_ratio": (_stationary_ratio, "limit", False),
}

# Short names accepted on the command line.
_ALIASES = {"Lindeberg": "Lindeberg_nu", "FellerLevy": "Lindeberg_nu"}

_COMPOSITES = ("Cox", "OliveiraA", "OliveiraB")


def list_conditions() -> List[str]:
    """All single conditions and composite checks that can be requested by name."""
    return sorted(_CONDITIONS) + sorted(_ALIASES) + list(_COMPOSITES)


def _record_failure(failures: List[EvaluatorFailure], name: str, error: Exception) -> None:
    logger.warning("Evaluator %s failed: %s: %s", name, type(error).__name__, error)
    failures.append(
        EvaluatorFailure(evaluator=name, error_type=type(error).__name__, message=str(error))
    )


def evaluate_trajectory(
    ctx: GridContext,
    condition_id: str,
    failures: List[EvaluatorFailure],
    points: Optional[Sequence[int]] = None,
) -> Optional[ConditionReport]:
    """
    Evaluate one registered condition over the grid and judge it.

    Args:
        ctx: Grid context
        condition_id: Registered condition id (or alias)
        failures: Receives an entry if the evaluator raises
        points: Grid override (defaults to ctx.n_grid)

    Returns:
        ConditionReport, or None if the evaluator failed
    """
    key = _ALIASES.get(condition_id, condition_id)
    if key not in _CONDITIONS:
        raise UnknownComponentError("condition", condition_id, list_conditions())
    evaluator, rule, distributional = _CONDITIONS[key]
    grid = []
    try:
        for n in points or ctx.n_grid:
            value = evaluator(ctx, n)
            logger.info("%s n=%d value=%.6g", key, n, value.value)
            grid.append(value)
    except Exception as e:
        _record_failure(failures, key, e)
        return None
    if distributional:
        source = "analytic" if ctx.closed_form else "empirical"
    else:
        source = ctx.covariance_source
    notes = {
        "Hc": "analytic block moments fell back to Monte Carlo" if ctx.fallback else None,
        "A3": "block Lindeberg functional with squared integrand, normalized by s_n",
        "B3": "per-variable Lindeberg functional summed over all n variables",
        "FellerMax": "max_j tau_j^2 / s_n^2 over full blocks",
    }
    return judge_trajectory(
        key,
        grid,
        ctx.tolerances,
        rule=rule,
        axis="n",
        threshold=ctx.tolerances.analytic_tol,
        source=source,
        note=notes.get(key),
    )


def _collect(
    ctx: GridContext, name: str, condition_ids: Sequence[str]
) -> Tuple[CompositeReport, List[EvaluatorFailure]]:
    failures: List[EvaluatorFailure] = []
    reports = []
    for condition_id in condition_ids:
        report = evaluate_trajectory(ctx, condition_id, failures)
        if report is not None:
            reports.append(report)
    return CompositeReport(name=name, reports=reports), failures


def _r_grid(ell: int) -> List[int]:
    grid = []
    r = 1
    while r < ell:
        grid.append(r)
        r *= 2
    grid.append(ell)
    return grid


def check_cox(ctx: GridContext) -> CompositeReport:
    """
    Cox-Grimmett hypotheses: variances bounded below, third moments bounded
    above, and u(r) -> 0 as r grows (at the largest n) with u(1) bounded.
    """
    report, failures = _collect(ctx, "Cox", ["coxA1_var", "coxA1_third", "coxA2_u1"])
    n_max = ctx.n_grid[-1]
    extras: Dict[str, object] = {}
    try:
        profile = ctx.profile(n_max)
        r_values = _r_grid(max(ctx.scheme(n_max).ell, 2))
        grid = [
            ConditionValue(condition_id="coxA2_r", n=n_max, r=r, value=cox_coefficient(profile, r))
            for r in r_values
        ]
        report.reports.insert(
            2,
            judge_trajectory(
                "coxA2_r", grid, ctx.tolerances, rule="limit", axis="r", source="analytic"
            ),
        )
        limits = [[float(r), cox_coefficient_limit(ctx.spec, r)] for r in r_values]
        extras["u_limit"] = [pair for pair in limits if math.isfinite(pair[1])]
    except Exception as e:
        _record_failure(failures, "coxA2_r", e)
    try:
        c1 = min(v.value for v in report.get("coxA1_var").grid)
        c2 = max(v.value for v in report.get("coxA1_third").grid)
        extras["lindeberg_bound"] = [
            [float(n), cox_lindeberg_bound(c1, c2, n, n, ctx.config.epsilon)] for n in ctx.n_grid
        ]
    except Exception as e:
        _record_failure(failures, "cox_lindeberg_bound", e)
    return report.model_copy(update={"extras": extras, "failures": failures})


def check_oliveira_A(ctx: GridContext) -> CompositeReport:
    """
    Block hypotheses: the block variances exhaust s_n^2 (A1), the m+1 block
    characteristic functions factorize (A2) and the blocks satisfy a
    Lindeberg condition normalized by s_n (A3).
    """
    report, failures = _collect(ctx, "OliveiraA", ["A1", "A2", "A3"])
    return report.model_copy(update={"failures": failures})


def check_oliveira_B(ctx: GridContext) -> CompositeReport:
    """
    Covariance hypotheses: u(n) -> 0 with u(1) finite (B1), s_n^2 / n
    bounded below (B2) and the per-variable Lindeberg condition (B3).

    The window coefficient u(l(n)) and the tail condition Hab are reported
    next to them; ``extras["gap_flag"]`` is set when B holds while Hab is
    not small.
    """
    report, failures = _collect(ctx, "OliveiraB", ["B1_u_n", "B1_u1", "B2", "B3"])
    extras: Dict[str, object] = {}
    u_ell = evaluate_trajectory(ctx, "B1_u_ell", failures)
    if u_ell is not None:
        extras["B1_u_ell"] = [[float(v.n), v.value] for v in u_ell.grid]
        extras["B1_u_ell_verdict"] = u_ell.verdict
    hab = evaluate_trajectory(ctx, "Hab", failures)
    if hab is not None:
        extras["Hab"] = [[float(v.n), v.value] for v in hab.grid]
        extras["Hab_verdict"] = hab.verdict
        b_holds = report.verdict == "holds_empirically"
        extras["gap_flag"] = b_holds and hab.last.distance >= ctx.tolerances.limit_tol
        if extras["gap_flag"]:
            logger.warning("B conditions hold while Hab = %.4g is not small", hab.last.value)
    return report.model_copy(update={"extras": extras, "failures": failures})


def check_conditions(ctx: GridContext, condition_ids: Sequence[str]) -> List[CompositeReport]:
    """
    Evaluate named conditions and composite checks in the given order.

    Single conditions are gathered in one composite named "conditions";
    each composite check contributes its own report.
    """
    singles = [c for c in condition_ids if c not in _COMPOSITES]
    results: List[CompositeReport] = []
    if singles:
        report, failures = _collect(ctx, "conditions", singles)
        results.append(report.model_copy(update={"failures": failures}))
    checks = {"Cox": check_cox, "OliveiraA": check_oliveira_A, "OliveiraB": check_oliveira_B}
    for name in condition_ids:
        if name in checks:
            results.append(checks[name](ctx))
    return results
