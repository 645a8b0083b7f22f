"""
Tests for families, random streams and replicate generation.
"""

import asyncio
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import toeplitz

from assoc_clt.core.config import parse_family
from assoc_clt.core.exceptions import AssociationViolationError, PreconditionError
from assoc_clt.core.scheme import parse_block_rule, make_block_scheme
from assoc_clt.covariance.profile import empirical_profile
from assoc_clt.generators import (
    RngStream,
    antithetic_replicates,
    block_sums_from_replicates,
    check_map,
    create_distribution,
    create_family,
    create_map,
    derive_seed,
    gen_common_factor,
    gen_gaussian,
    gen_geometric_gaussian,
    gen_iid,
    gen_markov_two_state,
    gen_monotone_transform,
    gen_moving_average,
    list_maps,
    replicate,
    replicate_async,
    simulate_block_sums,
    simulate_block_sums_async,
)
from assoc_clt.utils import chunk_bounds, run_with_concurrency_limit


# ---------------------------------------------------------------------------
# Streams and paths
# ---------------------------------------------------------------------------


def test_derived_seeds_are_stable_and_distinct():
    assert derive_seed(42, 0) == derive_seed(42, 0)
    seeds = {derive_seed(42, i) for i in range(100)}
    assert len(seeds) == 100
    assert derive_seed(42, 0) != derive_seed(43, 0)
    assert RngStream(master_seed=42, stream_id=3).seed == derive_seed(42, 3)


def test_paths_are_pure_functions_of_seed():
    first = gen_geometric_gaussian(0.5, 200, seed=5)
    again = gen_geometric_gaussian(0.5, 200, seed=5)
    other = gen_geometric_gaussian(0.5, 200, seed=6)
    np.testing.assert_array_equal(first.values, again.values)
    assert not np.array_equal(first.values, other.values)
    assert first.seed == 5
    assert not first.values.flags.writeable


def test_common_factor_path_is_constant():
    path = gen_common_factor("normal", 50, seed=1)
    assert np.all(path.values == path.values[0])


def test_markov_path_takes_two_centered_values():
    path = gen_markov_two_state(0.9, 0.7, 500, seed=3)
    family = create_family(path.family)
    levels = np.unique(path.values)
    assert levels.size <= 2
    np.testing.assert_allclose(np.sort(levels), [-family.pi1, 1.0 - family.pi1])


def test_monotone_transform_matches_direct_draw():
    base = gen_geometric_gaussian(0.5, 64, seed=9)
    transformed = gen_monotone_transform(base, "tanh", scale=2.0)
    family = create_family(transformed.family)
    np.testing.assert_array_equal(transformed.values, family.sample(64, 9))


# ---------------------------------------------------------------------------
# Replicates
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("family", ["iid-normal", "geo-gauss:rho=0.5", "markov:p0=0.9,p1=0.9"])
def test_replicates_do_not_depend_on_workers(family):
    spec = parse_family(family)
    serial = replicate(spec, 32, 20, master_seed=11)
    parallel = replicate(spec, 32, 20, master_seed=11, workers=3, chunk_size=3)
    np.testing.assert_array_equal(serial.values, parallel.values)
    assert serial.seeds == parallel.seeds


def test_replicate_rows_reproduce_from_their_seed(geo_gauss):
    reps = replicate(geo_gauss, 16, 5, master_seed=2)
    family = create_family(geo_gauss)
    for path in reps.iter_paths():
        np.testing.assert_array_equal(path.values, family.sample(16, path.seed))


def test_streaming_block_sums_match_stored_paths(geo_gauss):
    scheme = make_block_scheme(103, parse_block_rule("fixed:10"))
    stored = replicate(geo_gauss, 103, 40, master_seed=4)
    direct = simulate_block_sums(geo_gauss, scheme, 40, 4, workers=2, chunk_size=7,
                                 lindeberg_threshold=1.0)
    reduced = block_sums_from_replicates(stored, scheme, lindeberg_threshold=1.0)
    np.testing.assert_allclose(direct.block_sums, reduced.block_sums, rtol=0, atol=1e-12)
    np.testing.assert_allclose(direct.tail_sums, reduced.tail_sums, rtol=0, atol=1e-12)
    np.testing.assert_allclose(direct.truncated_sq, reduced.truncated_sq, rtol=0, atol=1e-12)
    np.testing.assert_allclose(direct.totals(), stored.totals(), rtol=0, atol=1e-9)


def test_block_reduction_requires_matching_length(iid_normal):
    stored = replicate(iid_normal, 50, 3, master_seed=0)
    with pytest.raises(PreconditionError):
        block_sums_from_replicates(stored, make_block_scheme(60, parse_block_rule("fixed:6")))


def test_replicate_rejects_zero_reps(iid_normal):
    with pytest.raises(PreconditionError):
        replicate(iid_normal, 10, 0, master_seed=0)


def test_antithetic_pairs_cancel():
    reps = antithetic_replicates(10, master_seed=1, n=5)
    values = reps.values
    np.testing.assert_array_equal(values[:, 1], -values[:, 0])
    np.testing.assert_array_equal(values[:, 3], -values[:, 2])
    assert values.shape == (10, 5)
    assert reps.family == parse_family("iid-normal")
    assert reps.label == "antithetic"


def test_antithetic_replicates_keep_their_base_family(geo_gauss):
    reps = antithetic_replicates(4, master_seed=2, n=6, family=geo_gauss)
    assert reps.family == geo_gauss
    base = replicate(geo_gauss, 3, 4, 2)
    np.testing.assert_array_equal(reps.values[:, 0::2], base.values)
    np.testing.assert_array_equal(reps.values[:, 1::2], -base.values)


# ---------------------------------------------------------------------------
# Autocovariances
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "family, expected",
    [
        ("iid-normal", [1.0, 0.0, 0.0, 0.0]),
        ("geo-gauss:rho=0.5", [1.0, 0.5, 0.25, 0.125]),
        ("ma:weights=1/1", [2.0, 1.0, 0.0, 0.0]),
        ("markov:p0=0.9,p1=0.9", [0.25, 0.2, 0.16, 0.128]),
        ("common-factor", [1.0, 1.0, 1.0, 1.0]),
    ],
)
def test_analytic_autocovariance(family, expected):
    np.testing.assert_allclose(create_family(parse_family(family)).autocovariance(4), expected)


@pytest.mark.parametrize(
    "family, n",
    [
        ("geo-gauss:rho=0.5", 6),
        ("gauss:gamma=1/0.5/0.25", 6),
        ("gauss:gamma=1/0.5/0.25", 40),
        ("ma:weights=1/0.5", 6),
        ("markov:p0=0.8,p1=0.6", 6),
    ],
)
def test_empirical_covariance_matches_analytic(family, n):
    spec = parse_family(family)
    reps = replicate(spec, n, 20000, master_seed=21)
    cov = np.asarray(empirical_profile(reps).gamma)[:6, :6]
    exact = toeplitz(create_family(spec).autocovariance(n))[:6, :6]
    np.testing.assert_allclose(cov, exact, atol=0.08)


def test_long_run_variance():
    assert create_family(parse_family("geo-gauss:rho=0.5")).long_run_variance().sigma2 == pytest.approx(3.0)
    assert create_family(parse_family("markov:p0=0.9,p1=0.9")).long_run_variance().sigma2 == pytest.approx(2.25)
    assert create_family(parse_family("ma:weights=1/1")).long_run_variance().sigma2 == pytest.approx(4.0)
    assert not create_family(parse_family("common-factor")).long_run_variance().finite


def test_monotone_covariances_obey_derivative_bound():
    spec = parse_family("monotone:map=tanh,scale=2,base=geo-gauss,base.rho=0.6")
    family = create_family(spec)
    gamma = family.autocovariance(20)
    base = family.base.autocovariance(20)
    assert np.all(gamma >= -1e-8)
    assert np.all(gamma <= 4.0 * base + 1e-8)
    assert gamma[1] < gamma[0]


def test_affine_transform_scales_covariance():
    spec = parse_family("monotone:map=affine,slope=2,intercept=1,base=geo-gauss")
    family = create_family(spec)
    np.testing.assert_allclose(family.autocovariance(5), 4.0 * 0.5 ** np.arange(5))
    assert family.is_gaussian
    assert family.mean() == pytest.approx(0.0)


def test_gaussian_marginal_moments():
    path = gen_iid("normal", 10, seed=0)
    family = create_family(path.family)
    assert family.abs_moment(3.0) == pytest.approx(2.0 * math.sqrt(2.0 / math.pi))
    assert family.truncated_second_moment(0.0) == pytest.approx(1.0)
    assert family.truncated_second_moment(50.0) == pytest.approx(0.0, abs=1e-12)


def test_explicit_gaussian_path():
    path = gen_gaussian([1.0, 0.5, 0.25], 100, seed=4)
    assert path.values.shape == (100,)


def test_moving_average_path():
    path = gen_moving_average([1.0, 1.0], 5000, seed=8)
    again = gen_moving_average([1.0, 1.0], 5000, seed=8)
    np.testing.assert_array_equal(path.values, again.values)
    assert path.family.kind == "moving_average"
    gamma = create_family(path.family).autocovariance(3)
    np.testing.assert_allclose(gamma, [2.0, 1.0, 0.0])
    assert np.var(path.values) == pytest.approx(2.0, rel=0.1)


def test_moving_average_rejects_negative_weights():
    with pytest.raises(AssociationViolationError):
        gen_moving_average([1.0, -0.5], 10, seed=0)


# ---------------------------------------------------------------------------
# Distributions and maps
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "name, params, variance",
    [
        ("normal", {}, 1.0),
        ("centered_exponential", {"rate": 2.0}, 0.25),
        ("centered_uniform", {"half_width": 1.0}, 1.0 / 3.0),
        ("rademacher", {}, 1.0),
    ],
)
def test_distributions_are_centered(name, params, variance):
    dist = create_distribution(name, **params)
    assert dist.expect(lambda x: x) == pytest.approx(0.0, abs=1e-9)
    assert dist.variance == pytest.approx(variance)


def test_rademacher_moments():
    dist = create_distribution("rademacher")
    assert dist.abs_moment(3.0) == pytest.approx(1.0)
    assert dist.truncated_second_moment(0.5) == pytest.approx(1.0)
    assert dist.truncated_second_moment(1.5) == pytest.approx(0.0)


def test_registered_maps_are_nondecreasing():
    for name in list_maps():
        params = {"xs": [0.0, 1.0], "ys": [0.0, 2.0]} if name == "piecewise_linear" else {}
        assert check_map(create_map(name, **params)), name


def test_decreasing_maps_are_rejected():
    with pytest.raises(ValueError):
        create_map("affine", slope=-1.0)
    with pytest.raises(ValueError):
        create_map("piecewise_linear", xs=[0.0, 1.0], ys=[1.0, 0.0])
    with pytest.raises(ValueError):
        create_map("clip", lo=1.0, hi=0.0)


@settings(max_examples=50)
@given(
    slope=st.floats(min_value=0.01, max_value=10.0),
    intercept=st.floats(min_value=-5.0, max_value=5.0),
)
def test_affine_maps_pass_the_monotonicity_check(slope, intercept):
    assert check_map(create_map("affine", slope=slope, intercept=intercept))


# ---------------------------------------------------------------------------
# Async entry points and helpers
# ---------------------------------------------------------------------------


async def test_replicate_async_matches_sync(geo_gauss):
    reps = await replicate_async(geo_gauss, 16, 12, master_seed=9, workers=4, chunk_size=5)
    np.testing.assert_array_equal(reps.values, replicate(geo_gauss, 16, 12, master_seed=9).values)


async def test_simulate_block_sums_async_matches_sync(iid_normal):
    scheme = make_block_scheme(30, parse_block_rule("fixed:7"))
    sums = await simulate_block_sums_async(iid_normal, scheme, 9, master_seed=1, workers=2, chunk_size=4)
    expected = simulate_block_sums(iid_normal, scheme, 9, 1)
    np.testing.assert_array_equal(sums.block_sums, expected.block_sums)


async def test_concurrency_limit_keeps_order():
    async def echo(i):
        await asyncio.sleep(0.001 * (5 - i))
        return i

    assert await run_with_concurrency_limit([echo(i) for i in range(5)], 2) == [0, 1, 2, 3, 4]


def test_chunk_bounds_cover_range():
    assert chunk_bounds(7, 3) == [(0, 3), (3, 6), (6, 7)]
    assert chunk_bounds(0, 3) == []
