"""
Tests for blocking schemes, configuration grammars and family validation.
"""

import json

import pytest
from hypothesis import given, settings, strategies as st

from assoc_clt.core.config import (
    apply_overrides,
    build_config,
    config_hash,
    dump_config,
    load_config,
    parse_family,
    parse_n_grid,
)
from assoc_clt.core.exceptions import (
    AssociationViolationError,
    ConfigError,
    InvalidSchemeError,
    UnknownComponentError,
)
from assoc_clt.core.models import FamilySpec
from assoc_clt.core.scheme import BlockRule, BlockScheme, make_block_scheme, parse_block_rule
from assoc_clt.core.validation import validate_family
from assoc_clt.generators.factory import create_family


# ---------------------------------------------------------------------------
# Block schemes
# ---------------------------------------------------------------------------


def test_fixed_rule_decomposition():
    scheme = make_block_scheme(103, parse_block_rule("fixed:10"))
    assert (scheme.ell, scheme.m, scheme.r) == (10, 10, 3)
    assert scheme.covered == 100
    assert scheme.block_bounds(1) == (0, 10)
    assert scheme.block_bounds(10) == (90, 100)
    assert scheme.block_bounds(11) == (100, 103)


def test_block_bounds_out_of_range():
    scheme = make_block_scheme(20, parse_block_rule("fixed:5"))
    with pytest.raises(IndexError):
        scheme.block_bounds(0)
    with pytest.raises(IndexError):
        scheme.block_bounds(6)


def test_power_rule_hits_exact_powers():
    rule = parse_block_rule("power:0.5")
    assert rule.ell(65536) == 256
    assert rule.ell(100) == 10
    assert rule.ell(99) == 9
    assert rule.ell(1) == 1


def test_block_longer_than_sequence_is_rejected():
    with pytest.raises(InvalidSchemeError):
        make_block_scheme(5, parse_block_rule("fixed:10"))


def test_nonpositive_length_is_rejected():
    with pytest.raises(InvalidSchemeError):
        make_block_scheme(0, BlockRule())


def test_scheme_model_rejects_inconsistent_parts():
    with pytest.raises(ValueError):
        BlockScheme(n=10, ell=3, m=3, r=2)
    with pytest.raises(ValueError):
        BlockScheme(n=10, ell=3, m=2, r=4)


def test_table_rule():
    rule = parse_block_rule("table:100=10/200=14")
    assert rule.ell(100) == 10
    assert rule.ell(200) == 14
    with pytest.raises(InvalidSchemeError):
        rule.ell(300)
    assert rule.describe() == "table:100=10/200=14"


def test_malformed_block_rules():
    with pytest.raises(InvalidSchemeError):
        parse_block_rule("fixed:abc")
    with pytest.raises(InvalidSchemeError):
        parse_block_rule("power:1.5")
    with pytest.raises(UnknownComponentError):
        parse_block_rule("bogus:3")


@settings(max_examples=50)
@given(
    n=st.integers(min_value=1, max_value=10**6),
    alpha=st.floats(min_value=0.05, max_value=0.95),
)
def test_power_scheme_decomposes_every_length(n, alpha):
    scheme = make_block_scheme(n, BlockRule(rule="power", alpha=alpha))
    assert scheme.m * scheme.ell + scheme.r == n
    assert 0 <= scheme.r < scheme.ell
    assert scheme.m >= 1


# ---------------------------------------------------------------------------
# Grammars
# ---------------------------------------------------------------------------


def test_parse_n_grid_forms():
    assert parse_n_grid("256:65536:x2") == [2**k for k in range(8, 17)]
    assert parse_n_grid("10:30:+10") == [10, 20, 30]
    assert parse_n_grid("5,7,9") == [5, 7, 9]
    assert parse_n_grid("64") == [64]
    assert parse_n_grid([8, 16]) == [8, 16]


@pytest.mark.parametrize("text", ["10:5:x2", "10:20:x1", "10:20:*2", "a:b:x2", "1:2"])
def test_parse_n_grid_errors(text):
    with pytest.raises(ConfigError):
        parse_n_grid(text)


def test_parse_family_aliases():
    geo = parse_family("geo-gauss")
    assert geo.kind == "gaussian_cov"
    assert geo.params == {"rho": 0.5, "variance": 1.0}

    markov = parse_family("markov:p0=0.9,p1=0.8")
    assert markov.params == {"p_stay0": 0.9, "p_stay1": 0.8}

    ma = parse_family("ma:weights=1/2")
    assert ma.params["weights"] == [1, 2]

    exp = parse_family("iid-exp:rate=2")
    assert exp.params["dist"] == "centered_exponential"
    assert exp.params["dist_params"] == {"rate": 2}

    gamma = parse_family("gauss:gamma=1/0.5/0.25")
    assert gamma.params == {"gamma": [1, 0.5, 0.25]}


def test_parse_monotone_family_with_base():
    spec = parse_family("monotone:map=tanh,scale=2,base=geo-gauss,base.rho=0.3")
    assert spec.kind == "monotone_transform"
    assert spec.params["map"] == "tanh"
    assert spec.params["map_params"] == {"scale": 2}
    assert spec.params["base"]["kind"] == "gaussian_cov"
    assert spec.params["base"]["params"]["rho"] == 0.3


def test_parse_family_errors():
    with pytest.raises(UnknownComponentError):
        parse_family("no-such-family")
    with pytest.raises(ConfigError):
        parse_family("iid:normal")
    with pytest.raises(ConfigError):
        parse_family("geo-gauss:bogus=1")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def test_build_config_defaults():
    config = build_config({"family": "iid-normal"})
    assert config.n_grid == [2**k for k in range(8, 17)]
    assert config.reps == 5000
    assert config.delta == 1.0
    assert config.epsilon == 0.1
    assert config.seed == 0
    assert config.tolerances.limit_tol == 0.05
    assert config.tolerances.ks_alpha == 0.05
    assert config.block_rule.describe() == "power:0.5"
    assert config.n_max == 65536


@pytest.mark.parametrize(
    "data",
    [
        {"family": "geo-gauss:rho=-0.2"},
        {"family": "iid-normal", "n_grid": "10:5:x2"},
        {"family": "iid-normal", "n_grid": [100], "block_rule": "fixed:300"},
        {"family": "iid-normal", "n_grid": [8, 4]},
        {"family": "iid-normal", "reps": 0},
        {"family": "iid-normal", "unknown_key": 1},
    ],
)
def test_build_config_rejects_invalid(data):
    with pytest.raises(ConfigError):
        build_config(data)


def test_config_error_lists_field_paths():
    with pytest.raises(ConfigError) as info:
        build_config({"family": "iid-normal", "tolerances": {"limit_tol": -1}})
    assert any("tolerances.limit_tol" in p for p in info.value.problems)


def test_load_config_reports_json_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"family": "iid-normal",\n  "reps": }\n')
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert "line 2" in str(info.value)


def test_load_config_requires_object(tmp_path):
    path = tmp_path / "list.json"
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(path)


def test_dump_and_load_preserve_hash(tmp_path):
    config = build_config({"family": "geo-gauss:rho=0.3", "n_grid": "64:256:x2", "seed": 11})
    path = tmp_path / "config.json"
    dump_config(config, path)
    assert config_hash(load_config(path)) == config_hash(config)


def test_config_hash_tracks_changes():
    config = build_config({"family": "iid-normal"})
    assert config_hash(config) == config_hash(build_config({"family": "iid-normal"}))
    assert config_hash(config) != config_hash(apply_overrides(config, ["seed=1"]))
    assert len(config_hash(config)) == 64


def test_apply_overrides():
    config = build_config({"family": "iid-normal"})
    updated = apply_overrides(
        config,
        ["reps=200", "tolerances.limit_tol=0.2", "family=iid-exp", "n_grid=64:256:x2"],
    )
    assert updated.reps == 200
    assert updated.tolerances.limit_tol == 0.2
    assert updated.family.params["dist"] == "centered_exponential"
    assert updated.n_grid == [64, 128, 256]
    assert apply_overrides(config, []) is config


def test_apply_overrides_rejects_malformed():
    config = build_config({"family": "iid-normal"})
    with pytest.raises(ConfigError):
        apply_overrides(config, ["reps"])
    with pytest.raises(ConfigError):
        apply_overrides(config, ["reps=-3"])


def test_config_is_frozen():
    config = build_config({"family": "iid-normal"})
    with pytest.raises(ValueError):
        config.reps = 10  # type: ignore[misc]


# ---------------------------------------------------------------------------
# Family validation
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    ["geo-gauss:rho=-0.1", "ma:weights=1/-0.5", "markov:p0=0.1,p1=0.1", "gauss:gamma=1/-0.2"],
)
def test_association_violations_raise(text):
    spec = parse_family(text)
    assert validate_family(spec)
    with pytest.raises(AssociationViolationError):
        create_family(spec)


def test_unknown_distribution_and_map():
    with pytest.raises(UnknownComponentError) as info:
        create_family(FamilySpec(kind="iid", params={"dist": "cauchy"}))
    assert "normal" in str(info.value)
    with pytest.raises(UnknownComponentError):
        create_family(parse_family("monotone:map=sigmoid"))


def test_non_psd_autocovariance_is_flagged():
    spec = parse_family("gauss:gamma=1/0.9/0.9/0.9/0.0")
    constraints = {v.constraint for v in validate_family(spec)}
    assert "positive-semidefinite" in constraints


def test_valid_families_have_no_violations():
    for text in ["iid-normal", "geo-gauss:rho=0.5", "ma:weights=1/1", "markov:p0=0.9,p1=0.9",
                 "monotone:map=tanh,base=geo-gauss", "common-factor"]:
        assert validate_family(parse_family(text)) == []


def test_config_example_file_round_trip(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({
        "family": {"kind": "markov_two_state", "params": {"p_stay0": 0.9, "p_stay1": 0.9}},
        "n_grid": [64, 128],
        "block_rule": {"rule": "fixed", "ell0": 8},
    }))
    config = load_config(path)
    assert config.family.kind == "markov_two_state"
    assert [s.m for s in config.schemes()] == [8, 16]
