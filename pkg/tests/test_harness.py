"""
Tests for the Monte Carlo CLT check, theorem reports and report files.
"""

import json
import logging
import math

import numpy as np
import pytest
from scipy import stats

from assoc_clt.core.config import parse_family
from assoc_clt.core.exceptions import PreconditionError, ReportWriteError, UnknownComponentError
from assoc_clt.core.models import CltVerdict, ConditionReport, ConditionValue, REPORT_SCHEMA
from assoc_clt.core.scheme import make_block_scheme, parse_block_rule
from assoc_clt.harness import (
    check_budget,
    clt_length,
    conditions_hold,
    consistency_flag,
    emit_report,
    ks_critical,
    ks_distance,
    list_theorems,
    moment_bounds,
    render_csv,
    run_clt,
    run_theorem,
    summarize_samples,
    write_text,
)

GRID = [256, 1024, 4096]


def _report(condition_id: str, verdict: str) -> ConditionReport:
    return ConditionReport(
        condition_id=condition_id,
        grid=[ConditionValue(condition_id=condition_id, n=8, value=0.0)],
        verdict=verdict,
    )


def _clt(passed: bool) -> CltVerdict:
    return CltVerdict(
        family=parse_family("iid-normal"),
        n=8,
        reps=100,
        seed=0,
        normalizer="analytic_s_n",
        scale=1.0,
        summary=summarize_samples(np.array([-1.0, 0.0, 1.0])),
        ks_distance=0.01,
        ks_critical=0.1358,
        alpha=0.05,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov
# ---------------------------------------------------------------------------


def test_ks_distance_of_normal_quantiles():
    quantiles = stats.norm.ppf((np.arange(1, 101) - 0.5) / 100)
    assert ks_distance(quantiles) == pytest.approx(0.005, abs=1e-9)


def test_ks_distance_of_point_mass():
    assert ks_distance(np.zeros(50)) == pytest.approx(0.5)


def test_ks_distance_needs_two_samples():
    with pytest.raises(PreconditionError):
        ks_distance(np.array([0.3]))


def test_ks_critical_value():
    assert ks_critical(0.05, 1) == pytest.approx(1.3581, abs=1e-4)
    assert ks_critical(0.05, 5000) == pytest.approx(1.3581 / math.sqrt(5000), rel=1e-4)
    with pytest.raises(PreconditionError):
        ks_critical(1.5, 100)


def test_moment_bounds_shrink_with_reps():
    small, large = moment_bounds(100), moment_bounds(10000)
    assert large["skewness"] == pytest.approx(small["skewness"] / 10)
    assert large["excess_kurtosis"] < small["excess_kurtosis"]


def test_budget_guard(caplog):
    check_budget(10, 100, 1000, allow_large=False)
    with pytest.raises(PreconditionError):
        check_budget(10, 101, 1000, allow_large=False)
    with caplog.at_level(logging.WARNING):
        check_budget(10, 101, 1000, allow_large=True)
    assert "sample budget" in caplog.text


# ---------------------------------------------------------------------------
# CLT runs
# ---------------------------------------------------------------------------


def test_iid_sums_look_normal(iid_normal):
    verdict = run_clt(iid_normal, 64, 2000, seed=3)
    assert verdict.scale == pytest.approx(8.0)
    assert verdict.ks_critical == pytest.approx(ks_critical(0.05, 2000))
    assert verdict.ks_distance < 1.5 * verdict.ks_critical
    assert verdict.summary.count == 2000
    assert verdict.samples.shape == (2000,)


def test_clt_run_is_reproducible(geo_gauss):
    first = run_clt(geo_gauss, 32, 300, seed=5)
    again = run_clt(geo_gauss, 32, 300, seed=5, workers=3, chunk_size=50)
    np.testing.assert_array_equal(first.samples, again.samples)
    assert first.ks_distance == again.ks_distance


def test_common_factor_sums_are_not_normal():
    verdict = run_clt(parse_family("common-factor-exp"), 64, 2000, seed=3)
    assert not verdict.passed
    assert verdict.ks_distance > 0.1


@pytest.mark.slow
def test_ks_separates_geometric_from_common_factor(geo_gauss):
    critical = ks_critical(0.05, 5000)
    assert critical == pytest.approx(0.01921, abs=1e-5)
    geometric = run_clt(geo_gauss, 4096, 5000, seed=1)
    assert geometric.ks_critical == pytest.approx(critical)
    assert geometric.ks_distance < critical
    assert geometric.passed
    common = run_clt(parse_family("common-factor-exp"), 4096, 5000, seed=1)
    assert common.ks_distance > critical
    assert not common.passed


def test_normalizers(geo_gauss, common_factor):
    stationary = run_clt(geo_gauss, 100, 200, seed=1, normalizer="stationary_sigma_sqrt_n")
    assert stationary.scale == pytest.approx(math.sqrt(300.0))
    empirical = run_clt(geo_gauss, 100, 200, seed=1, normalizer="empirical_s_n")
    assert empirical.summary.sd == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        run_clt(common_factor, 16, 200, seed=1, normalizer="stationary_sigma_sqrt_n")


def test_clt_run_preconditions(iid_normal):
    with pytest.raises(UnknownComponentError) as info:
        run_clt(iid_normal, 16, 200, seed=0, normalizer="mad")
    assert "analytic_s_n" in str(info.value)
    with pytest.raises(PreconditionError):
        run_clt(iid_normal, 16, 50, seed=0)
    with pytest.raises(PreconditionError):
        run_clt(iid_normal, 1000, 200, seed=0, sample_budget=10000)


# ---------------------------------------------------------------------------
# Theorem logic
# ---------------------------------------------------------------------------


def test_conditions_hold_groups():
    reports = [
        _report("Ha", "holds_empirically"),
        _report("Hab", "fails_empirically"),
        _report("Hb", "holds_empirically"),
        _report("H0", "inconclusive"),
    ]
    assert conditions_hold([["Ha"], ["Hab", "Hb"]], reports) is True
    assert conditions_hold([["Ha"], ["Hab"]], reports) is False
    assert conditions_hold([["Ha"], ["H0"]], reports) is None
    assert conditions_hold([["Ha"], ["missing"]], reports) is None


@pytest.mark.parametrize(
    "hold, passed, expected",
    [
        (True, True, "consistent"),
        (False, False, "consistent"),
        (True, False, "conditions_hold_clt_fails"),
        (False, True, "conditions_fail_clt_passes"),
        (None, True, "inconclusive"),
    ],
)
def test_consistency_flag(hold, passed, expected):
    assert consistency_flag(hold, _clt(passed)) == expected


def test_consistency_without_clt():
    assert consistency_flag(True, None) == "inconclusive"


def test_clt_length_respects_budget(small_config):
    assert clt_length(small_config("iid-normal")) == 256
    assert clt_length(small_config("iid-normal", sample_budget=200000)) == 128
    assert clt_length(small_config("iid-normal", sample_budget=1000, allow_large_budget=True)) == 256
    with pytest.raises(PreconditionError):
        clt_length(small_config("iid-normal", sample_budget=1000))


def test_theorem_registry():
    assert list_theorems() == [
        "T1_stationary", "T1_general", "T2", "T3", "Cox", "OliveiraA", "OliveiraB", "GapDemo",
    ]


def test_unknown_theorem(small_config):
    with pytest.raises(UnknownComponentError):
        run_theorem("T9", small_config("iid-normal"))


def test_iid_satisfies_general_theorem(small_config):
    config = small_config("iid-normal", n_grid=GRID, tolerances={"limit_tol": 0.25})
    report = run_theorem("T1_general", config, run_clt_check=False)
    assert [r.condition_id for r in report.conditions] == ["H0", "Ha", "Hb", "Hc"]
    assert report.conditions_hold is True
    assert report.clt is None
    assert report.consistency == "inconclusive"
    assert not report.incomplete
    assert report.provenance.master_seed == 7


@pytest.mark.slow
def test_iid_general_theorem_with_clt(small_config):
    config = small_config("iid-normal", n_grid=GRID, tolerances={"limit_tol": 0.25})
    report = run_theorem("T1_general", config)
    assert report.clt is not None
    assert report.clt.n == 4096
    assert report.clt.ks_distance < 1.5 * report.clt.ks_critical
    assert report.consistency in ("consistent", "conditions_hold_clt_fails")


def test_t3_reports_cf_gaps(small_config):
    report = run_theorem("T3", small_config("geo-gauss:rho=0.5", n_grid=GRID), run_clt_check=False)
    assert set(report.cf) == {"block", "full_block", "product_limit", "truncation"}
    assert all(g.holds for g in report.cf["block"])
    assert {"C2gap", "Lindeberg_nu", "FellerMax", "FullBlockGap"} <= {
        r.condition_id for r in report.conditions
    }


def test_gap_demo_adds_decomposition_bound(small_config):
    report = run_theorem("GapDemo", small_config("iid-normal", n_grid=GRID), run_clt_check=False)
    assert len(report.extras["decomposition_bound"]) == 3
    assert {"Hab", "HNab", "B2S"} <= {r.condition_id for r in report.conditions}
    hab = next(r for r in report.conditions if r.condition_id == "Hab")
    for point in hab.grid:
        scheme = make_block_scheme(point.n, parse_block_rule("power:0.5"))
        assert point.value == pytest.approx(scheme.r / point.n, abs=1e-12)


def test_stationary_theorem_on_common_factor_is_incomplete(small_config):
    report = run_theorem("T1_stationary", small_config("common-factor"), run_clt_check=False)
    assert report.incomplete
    assert "stationary_ratio" in [f.evaluator for f in report.failures]


# ---------------------------------------------------------------------------
# Report files
# ---------------------------------------------------------------------------


def test_json_report_is_deterministic(tmp_path, small_config):
    config = small_config("geo-gauss:rho=0.5")
    first = emit_report(run_theorem("T2", config, run_clt_check=False), tmp_path / "a")
    again = emit_report(run_theorem("T2", config, run_clt_check=False), tmp_path / "b")
    assert first[0].name == "T2.json"
    assert first[0].read_bytes() == again[0].read_bytes()
    data = json.loads(first[0].read_text())
    assert data["schema"] == REPORT_SCHEMA
    assert data["theorem_id"] == "T2"
    assert data["provenance"]["tool"] == "assoc-clt"
    assert len(data["provenance"]["config_hash"]) == 64


def test_csv_bundle(tmp_path, small_config):
    report = run_theorem("T1_general", small_config("iid-normal"), run_clt_check=False)
    paths = emit_report(report, tmp_path, fmt="csv")
    names = [p.name for p in paths]
    assert names == ["H0.csv", "Ha.csv", "Hb.csv", "Hc.csv", "verdicts.csv", "clt.csv"]
    lines = (tmp_path / "Ha.csv").read_text().splitlines()
    assert lines[0].startswith("# assoc-clt ")
    assert lines[1] == "condition_id,n,r,value,target,stderr,flags"
    assert len(lines) == 2 + 3
    assert len((tmp_path / "clt.csv").read_text().splitlines()) == 2


def test_emit_incomplete_report_warns(tmp_path, small_config, caplog):
    report = run_theorem("T1_stationary", small_config("common-factor"), run_clt_check=False)
    with caplog.at_level(logging.WARNING):
        emit_report(report, tmp_path)
    assert "incomplete" in caplog.text
    assert json.loads((tmp_path / "T1_stationary.json").read_text())["incomplete"] is True


def test_emit_rejects_unknown_format(tmp_path, small_config):
    report = run_theorem("T1_general", small_config("iid-normal"), run_clt_check=False)
    with pytest.raises(ValueError):
        emit_report(report, tmp_path, fmt="xml")


def test_render_csv_blanks_missing_values():
    text = render_csv(["a", "b"], [[1, None]], None)
    assert text == "# assoc-clt\na,b\n1,\n"


def test_write_text_failure(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("x")
    with pytest.raises(ReportWriteError):
        write_text(blocker / "report.json", "{}")
