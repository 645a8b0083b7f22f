"""
Shared fixtures for the assoc-clt test suite.
"""

import pytest

from assoc_clt.core.config import build_config, parse_family
from assoc_clt.core.models import FamilySpec


@pytest.fixture
def iid_normal() -> FamilySpec:
    return parse_family("iid-normal")


@pytest.fixture
def geo_gauss() -> FamilySpec:
    return parse_family("geo-gauss:rho=0.5")


@pytest.fixture
def common_factor() -> FamilySpec:
    return parse_family("common-factor")


@pytest.fixture
def small_config():
    """Short grid with cheap Monte Carlo settings."""

    def make(family: str, **overrides):
        data = {
            "family": family,
            "n_grid": [64, 128, 256],
            "block_rule": "power:0.5",
            "reps": 1000,
            "seed": 7,
        }
        data.update(overrides)
        return build_config(data, "test")

    return make
