"""
Replicate generation and streaming block-sum reduction.

Replicates are generated in fixed chunks of ``chunk_size`` paths. Path i is
drawn from the stream keyed by derive_seed(master_seed, i), so neither the
chunking nor the number of workers changes any value.
"""

import asyncio
import logging
from typing import List, Optional, Tuple

import numpy as np

from ..core.exceptions import PreconditionError
from ..core.models import BlockSumSet, FamilySpec, ReplicateSet
from ..core.scheme import BlockScheme
from ..utils.helpers import chunk_bounds, run_with_concurrency_limit
from .base import BaseFamily
from .factory import create_family
from .rng import derive_seeds, generator_from_seed

logger = logging.getLogger(__name__)

# Upper bound on values materialized at once by the streaming reduction.
_MAX_BATCH_VALUES = 2**22


def _check_reps(reps: int) -> None:
    if reps < 1:
        raise PreconditionError(f"reps must be >= 1, got {reps}")


def _generate_chunk(family: BaseFamily, n: int, seeds: List[int]) -> np.ndarray:
    return family.sample_rows([generator_from_seed(s) for s in seeds], n)


def _reduce_chunk(
    family: BaseFamily,
    scheme: BlockScheme,
    seeds: List[int],
    threshold: Optional[float],
) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    n, m, ell = scheme.n, scheme.m, scheme.ell
    rows = max(1, min(len(seeds), _MAX_BATCH_VALUES // n))
    blocks, tails, truncated = [], [], []
    for start, stop in chunk_bounds(len(seeds), rows):
        values = _generate_chunk(family, n, seeds[start:stop])
        blocks.append(values[:, : m * ell].reshape(-1, m, ell).sum(axis=2))
        tails.append(values[:, m * ell :].sum(axis=1))
        if threshold is not None:
            truncated.append(np.where(np.abs(values) >= threshold, values**2, 0.0).sum(axis=1))
    trunc = np.concatenate(truncated) if threshold is not None else None
    return np.concatenate(blocks), np.concatenate(tails), trunc


def _assemble(
    spec: FamilySpec,
    scheme: BlockScheme,
    master_seed: int,
    parts: List[Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]],
    threshold: Optional[float],
) -> BlockSumSet:
    logger.debug("Reduced %d chunks of n=%d into %d blocks", len(parts), scheme.n, scheme.m)
    return BlockSumSet(
        family=spec,
        scheme=scheme,
        master_seed=master_seed,
        block_sums=np.concatenate([p[0] for p in parts]),
        tail_sums=np.concatenate([p[1] for p in parts]),
        lindeberg_threshold=threshold,
        truncated_sq=np.concatenate([p[2] for p in parts]) if threshold is not None else None,
    )


async def replicate_async(
    spec: FamilySpec,
    n: int,
    reps: int,
    master_seed: int,
    workers: int = 1,
    chunk_size: int = 256,
    jitter: float = 1e-10,
) -> ReplicateSet:
    """
    Generate R independent paths concurrently.

    Args:
        spec: Family specification
        n: Path length
        reps: Number of paths R (>= 1)
        master_seed: Master seed; path i uses stream i
        workers: Maximum concurrent chunks
        chunk_size: Paths per chunk
        jitter: Largest diagonal jitter for covariance factorizations

    Returns:
        ReplicateSet, bit-identical for any number of workers

    Raises:
        PreconditionError: If reps < 1
    """
    _check_reps(reps)
    family = create_family(spec, jitter=jitter)
    family.prepare(n)
    seeds = derive_seeds(master_seed, 0, reps)
    tasks = [
        asyncio.to_thread(_generate_chunk, family, n, seeds[start:stop])
        for start, stop in chunk_bounds(reps, chunk_size)
    ]
    chunks = await run_with_concurrency_limit(tasks, workers)
    return ReplicateSet(
        family=spec, n=n, master_seed=master_seed, seeds=seeds, values=np.concatenate(chunks)
    )


def replicate(
    spec: FamilySpec,
    n: int,
    reps: int,
    master_seed: int,
    workers: int = 1,
    chunk_size: int = 256,
    jitter: float = 1e-10,
) -> ReplicateSet:
    """Synchronous ``replicate_async``; runs serially when workers == 1."""
    _check_reps(reps)
    if workers > 1:
        return asyncio.run(
            replicate_async(spec, n, reps, master_seed, workers, chunk_size, jitter)
        )
    family = create_family(spec, jitter=jitter)
    family.prepare(n)
    seeds = derive_seeds(master_seed, 0, reps)
    chunks = [
        _generate_chunk(family, n, seeds[start:stop])
        for start, stop in chunk_bounds(reps, chunk_size)
    ]
    return ReplicateSet(
        family=spec, n=n, master_seed=master_seed, seeds=seeds, values=np.concatenate(chunks)
    )


async def simulate_block_sums_async(
    spec: FamilySpec,
    scheme: BlockScheme,
    reps: int,
    master_seed: int,
    workers: int = 1,
    chunk_size: int = 256,
    lindeberg_threshold: Optional[float] = None,
    jitter: float = 1e-10,
) -> BlockSumSet:
    """
    Block sums of R paths without keeping the paths.

    Row i equals the reduction of path i of ``replicate`` with the same
    master seed.

    Args:
        spec: Family specification
        scheme: Blocking scheme (fixes n)
        reps: Number of replicates
        master_seed: Master seed
        workers: Maximum concurrent chunks
        chunk_size: Replicates per chunk
        lindeberg_threshold: If given, also accumulate sum_i X_i^2 1{|X_i| >= threshold}
        jitter: Largest diagonal jitter for covariance factorizations

    Returns:
        BlockSumSet with block sums, tail sums and optional truncated moments
    """
    _check_reps(reps)
    family = create_family(spec, jitter=jitter)
    family.prepare(scheme.n)
    seeds = derive_seeds(master_seed, 0, reps)
    tasks = [
        asyncio.to_thread(_reduce_chunk, family, scheme, seeds[start:stop], lindeberg_threshold)
        for start, stop in chunk_bounds(reps, chunk_size)
    ]
    parts = await run_with_concurrency_limit(tasks, workers)
    return _assemble(spec, scheme, master_seed, parts, lindeberg_threshold)


def simulate_block_sums(
    spec: FamilySpec,
    scheme: BlockScheme,
    reps: int,
    master_seed: int,
    workers: int = 1,
    chunk_size: int = 256,
    lindeberg_threshold: Optional[float] = None,
    jitter: float = 1e-10,
) -> BlockSumSet:
    """Synchronous ``simulate_block_sums_async``; runs serially when workers == 1."""
    if workers <= 1:
        _check_reps(reps)
        family = create_family(spec, jitter=jitter)
        family.prepare(scheme.n)
        seeds = derive_seeds(master_seed, 0, reps)
        parts = [
            _reduce_chunk(family, scheme, seeds[start:stop], lindeberg_threshold)
            for start, stop in chunk_bounds(reps, chunk_size)
        ]
        return _assemble(spec, scheme, master_seed, parts, lindeberg_threshold)
    return asyncio.run(
        simulate_block_sums_async(
            spec, scheme, reps, master_seed, workers, chunk_size, lindeberg_threshold, jitter
        )
    )


def block_sums_from_replicates(
    reps: ReplicateSet, scheme: BlockScheme, lindeberg_threshold: Optional[float] = None
) -> BlockSumSet:
    """
    Reduce stored paths to block sums.

    Raises:
        PreconditionError: If the scheme length differs from the path length
    """
    if scheme.n != reps.n:
        raise PreconditionError(f"scheme is for n={scheme.n}, paths have n={reps.n}")
    values = reps.values
    m, ell = scheme.m, scheme.ell
    truncated = None
    if lindeberg_threshold is not None:
        truncated = np.where(np.abs(values) >= lindeberg_threshold, values**2, 0.0).sum(axis=1)
    return BlockSumSet(
        family=reps.family,
        scheme=scheme,
        master_seed=reps.master_seed,
        block_sums=values[:, : m * ell].reshape(-1, m, ell).sum(axis=2),
        tail_sums=values[:, m * ell :].sum(axis=1),
        lindeberg_threshold=lindeberg_threshold,
        truncated_sq=truncated,
    )


def antithetic_replicates(
    reps: int, master_seed: int, n: int = 2, family: Optional[FamilySpec] = None
) -> ReplicateSet:
    """
    Built-in adversarial input: X_2k = -X_2k-1, with the odd coordinates a
    path of ``family`` (iid N(0, 1) by default) of length ceil(n/2).

    Not associated; used to show that the association and demimartingale
    probes flag violations. The returned set carries the base family and the
    label "antithetic".
    """
    _check_reps(reps)
    if n < 2:
        raise PreconditionError("antithetic paths need n >= 2")
    spec = family or FamilySpec(kind="iid", params={"dist": "normal"})
    base = create_family(spec)
    half = (n + 1) // 2
    base.prepare(half)
    seeds = derive_seeds(master_seed, 0, reps)
    draws = _generate_chunk(base, half, seeds)
    values = np.empty((reps, n))
    values[:, 0::2] = draws
    values[:, 1::2] = -draws[:, : n // 2]
    return ReplicateSet(
        family=spec,
        n=n,
        master_seed=master_seed,
        seeds=seeds,
        values=values,
        label="antithetic",
    )
