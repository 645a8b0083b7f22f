"""Associated families, path generators and replicate sets."""

from .base import BaseFamily
from .common_factor import CommonFactorFamily
from .distributions import (
    CenteredDistribution,
    create_distribution,
    list_distributions,
    normal_distribution,
    register_distribution,
)
from .factory import create_family, list_families, register_family
from .gaussian import GaussianFamily
from .iid import IIDFamily
from .markov import MarkovTwoStateFamily
from .monotone import MonotoneTransformFamily
from .moving_average import MovingAverageFamily
from .paths import (
    gen_common_factor,
    gen_gaussian,
    gen_geometric_gaussian,
    gen_iid,
    gen_markov_two_state,
    gen_monotone_transform,
    gen_moving_average,
    generate_path,
)
from .replicate import (
    antithetic_replicates,
    block_sums_from_replicates,
    replicate,
    replicate_async,
    simulate_block_sums,
    simulate_block_sums_async,
)
from .rng import RngStream, derive_seed, derive_seeds, generator_from_seed
from .transforms import MonotoneMap, check_map, create_map, list_maps, register_map

__all__ = [
    "BaseFamily", "CommonFactorFamily", "GaussianFamily", "IIDFamily", "MarkovTwoStateFamily",
    "MonotoneTransformFamily", "MovingAverageFamily",
    "CenteredDistribution", "create_distribution", "list_distributions", "normal_distribution",
    "register_distribution",
    "create_family", "list_families", "register_family",
    "gen_common_factor", "gen_gaussian", "gen_geometric_gaussian", "gen_iid",
    "gen_markov_two_state", "gen_monotone_transform", "gen_moving_average", "generate_path",
    "antithetic_replicates", "block_sums_from_replicates", "replicate", "replicate_async",
    "simulate_block_sums", "simulate_block_sums_async",
    "RngStream", "derive_seed", "derive_seeds", "generator_from_seed",
    "MonotoneMap", "check_map", "create_map", "list_maps", "register_map",
]
