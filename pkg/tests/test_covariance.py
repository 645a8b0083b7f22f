"""
Tests for covariance profiles, Cox coefficients, covariance identities and probes.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from assoc_clt.core.config import parse_family
from assoc_clt.core.exceptions import DegenerateVarianceError, PreconditionError
from assoc_clt.core.models import CovarianceProfile, ReplicateSet
from assoc_clt.covariance import (
    analytic_profile,
    association_probe,
    cox_coefficient,
    cox_coefficient_limit,
    default_battery,
    demimartingale_probe,
    hoeffding_copies_cov,
    hoeffding_cov,
    lemma_battery,
    long_run_variance,
    newman_functional_check,
    require_positive,
    s_n_squared,
    stationary_ratio,
    summarize_profile,
)
from assoc_clt.generators import antithetic_replicates, replicate


# ---------------------------------------------------------------------------
# Hoeffding identity
# ---------------------------------------------------------------------------


def _direct_cov(joint):
    ex = sum(p * x for (x, _), p in joint.items())
    ey = sum(p * y for (_, y), p in joint.items())
    exy = sum(p * x * y for (x, y), p in joint.items())
    return exy - ex * ey


def test_hoeffding_comonotone_pair():
    assert hoeffding_cov({(0, 0): 0.5, (1, 1): 0.5}) == pytest.approx(0.25, abs=1e-12)


def test_hoeffding_dependent_table():
    joint = {(0, 0): 0.4, (0, 1): 0.1, (1, 0): 0.1, (1, 1): 0.4}
    assert hoeffding_cov(joint) == pytest.approx(0.15, abs=1e-12)


def test_hoeffding_degenerate_marginal():
    assert hoeffding_cov({(2.0, 0.0): 0.3, (2.0, 1.0): 0.7}) == 0.0


def test_hoeffding_rejects_bad_tables():
    with pytest.raises(PreconditionError):
        hoeffding_cov({})
    with pytest.raises(PreconditionError):
        hoeffding_cov({(0, 0): 0.5, (1, 1): 0.4})
    with pytest.raises(PreconditionError):
        hoeffding_cov({(0, 0): 1.2, (1, 1): -0.2})


@settings(max_examples=50)
@given(
    weights=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=9, max_size=9).filter(
        lambda w: sum(w) > 1e-3
    ),
    xs=st.lists(st.integers(min_value=-5, max_value=5), min_size=3, max_size=3, unique=True),
    ys=st.lists(st.integers(min_value=-5, max_value=5), min_size=3, max_size=3, unique=True),
)
def test_hoeffding_matches_direct_covariance(weights, xs, ys):
    total = sum(weights)
    joint = {}
    for k, w in enumerate(weights):
        joint[(xs[k // 3], ys[k % 3])] = w / total
    assert hoeffding_cov(joint) == pytest.approx(_direct_cov(joint), abs=1e-12)


def test_hoeffding_copies_estimate(geo_gauss):
    reps = replicate(geo_gauss, 2, 20000, master_seed=3)
    estimate, stderr = hoeffding_copies_cov(reps.values[:, 0], reps.values[:, 1], seed=1)
    assert abs(estimate - 0.5) < 5.0 * stderr


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------


def test_iid_profile_scalars(iid_normal):
    profile = analytic_profile(iid_normal, 103)
    assert s_n_squared(profile) == pytest.approx(103.0)
    assert stationary_ratio(profile, long_run_variance(iid_normal)) == pytest.approx(1.0)
    assert cox_coefficient(profile, 0) == pytest.approx(1.0)
    assert cox_coefficient(profile, 1) == 0.0


def test_geometric_profile_scalars(geo_gauss):
    profile = analytic_profile(geo_gauss, 1000)
    lrv = long_run_variance(geo_gauss)
    assert lrv.finite and lrv.sigma2 == pytest.approx(3.0)
    # s_n^2 = 3n - 4 (1 - 2^-n)
    assert s_n_squared(profile) == pytest.approx(3000.0 - 4.0, rel=1e-12)
    assert stationary_ratio(profile, lrv) == pytest.approx(1.0 - 4.0 / 3000.0, rel=1e-9)
    assert cox_coefficient(profile, 1) == pytest.approx(2.0, rel=1e-9)
    assert cox_coefficient_limit(geo_gauss, 1) == pytest.approx(2.0)
    assert cox_coefficient_limit(geo_gauss, 0) == pytest.approx(3.0)
    assert cox_coefficient_limit(geo_gauss, 4) == pytest.approx(2.0 * 0.5**4 / 0.5)


def test_common_factor_profile(common_factor):
    profile = analytic_profile(common_factor, 50)
    assert s_n_squared(profile) == pytest.approx(2500.0)
    lrv = long_run_variance(common_factor)
    assert not lrv.finite
    with pytest.raises(PreconditionError):
        stationary_ratio(profile, lrv)
    assert math.isinf(cox_coefficient_limit(common_factor, 3))


@settings(max_examples=50)
@given(
    rho=st.floats(min_value=0.0, max_value=0.95),
    n=st.integers(min_value=1, max_value=40),
    r=st.integers(min_value=0, max_value=45),
)
def test_cox_coefficient_stationary_matches_matrix(rho, n, r):
    profile = analytic_profile(parse_family(f"geo-gauss:rho={rho!r}"), n)
    dense = CovarianceProfile(n=n, source="analytic", gamma=profile.matrix())
    assert cox_coefficient(profile, r) == pytest.approx(cox_coefficient(dense, r), abs=1e-12)


def test_cox_coefficient_is_nonincreasing_in_r(geo_gauss):
    profile = analytic_profile(geo_gauss, 64)
    values = [cox_coefficient(profile, r) for r in range(0, 70)]
    assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))
    assert values[-1] == 0.0
    with pytest.raises(PreconditionError):
        cox_coefficient(profile, -1)


def test_window_sums_match_matrix(geo_gauss):
    profile = analytic_profile(geo_gauss, 30)
    matrix = profile.matrix()
    for start, stop in [(0, 30), (3, 9), (10, 11), (5, 5)]:
        assert profile.window_sum(start, stop) == pytest.approx(matrix[start:stop, start:stop].sum())


def test_require_positive():
    assert require_positive(2.0) == 2.0
    with pytest.raises(DegenerateVarianceError):
        require_positive(0.0)


def test_summarize_profile(geo_gauss):
    report = summarize_profile(analytic_profile(geo_gauss, 128), [0, 1, 4])
    assert report.sigma2 == pytest.approx(3.0)
    assert report.sigma2_finite
    assert [pair[0] for pair in report.u] == [0.0, 1.0, 4.0]
    assert report.u_limit[1][1] == pytest.approx(2.0)


def test_summarize_common_factor(common_factor):
    report = summarize_profile(analytic_profile(common_factor, 16), [1, 2])
    assert report.sigma2 is None
    assert not report.sigma2_finite
    assert report.stationary_ratio is None
    assert report.u_limit == []


# ---------------------------------------------------------------------------
# Functional inequality and probes
# ---------------------------------------------------------------------------


def test_batteries_are_monotone():
    assert default_battery().verify() == []
    assert lemma_battery().verify() == []


def test_newman_inequality_holds_on_associated_pairs(geo_gauss):
    reps = replicate(geo_gauss, 2, 5000, master_seed=8)
    x, y = reps.values[:, 0], reps.values[:, 1]
    for pair in lemma_battery():
        check = newman_functional_check(x, y, pair)
        assert check.holds, check
        assert check.rhs > 0


def test_newman_check_needs_enough_samples(geo_gauss):
    reps = replicate(geo_gauss, 2, 100, master_seed=8)
    pair = next(iter(lemma_battery()))
    with pytest.raises(PreconditionError):
        newman_functional_check(reps.values[:, 0], reps.values[:, 1], pair)


def test_association_probe_passes_associated_family(geo_gauss):
    result = association_probe(replicate(geo_gauss, 4, 2000, master_seed=5))
    assert result.probe == "association"
    assert not result.flag
    assert result.evaluated == len(default_battery()) * 4


def test_association_probe_flags_antithetic_input():
    result = association_probe(antithetic_replicates(2000, master_seed=5, n=4))
    assert result.flag
    assert result.min_value < 0


def test_demimartingale_probe():
    associated = demimartingale_probe(replicate(parse_family("geo-gauss:rho=0.5"), 4, 2000, 6))
    assert not associated.flag
    adversarial = demimartingale_probe(antithetic_replicates(2000, master_seed=6, n=4))
    assert adversarial.flag


def test_demimartingale_probe_sees_running_maximum():
    # X3 is uncorrelated with every g(S_2) but moves against max(S_1, S_2).
    paths = np.array(
        [[1.0, 1.0, 0.0], [1.0, -1.0, -1.0], [-1.0, 1.0, 1.0], [-1.0, -1.0, 0.0]]
    )
    values = np.tile(paths, (300, 1))
    reps = ReplicateSet(
        family=parse_family("iid-rademacher"),
        n=3,
        master_seed=0,
        seeds=list(range(values.shape[0])),
        values=values,
        label="running-max",
    )
    result = demimartingale_probe(reps)
    assert result.flag
    assert "(S_j)" not in result.argmin
    assert result.evaluated == 3 * len(default_battery()) * 2


def test_probes_need_enough_replicates(geo_gauss):
    reps = replicate(geo_gauss, 4, 100, master_seed=5)
    with pytest.raises(PreconditionError):
        association_probe(reps)
    with pytest.raises(PreconditionError):
        demimartingale_probe(reps)
