"""
Counter-based random streams.

Stream i of a master seed is a Philox generator keyed by a 64-bit seed
derived from (master_seed, i). The derived seed alone reproduces the
stream, so a SamplePath carries everything needed to regenerate it.
"""

from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

MAX_SEED = 2**64 - 1


def derive_seed(master_seed: int, stream_id: int) -> int:
    """64-bit seed of stream ``stream_id`` under ``master_seed``."""
    state = np.random.SeedSequence(master_seed, spawn_key=(stream_id,)).generate_state(1, np.uint64)
    return int(state[0])


def derive_seeds(master_seed: int, start: int, stop: int) -> List[int]:
    return [derive_seed(master_seed, i) for i in range(start, stop)]


def generator_from_seed(seed: int) -> np.random.Generator:
    """Philox generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


class RngStream(BaseModel):
    """One reproducible random stream."""

    model_config = ConfigDict(frozen=True)

    master_seed: int = Field(..., ge=0, le=MAX_SEED)
    stream_id: int = Field(default=0, ge=0, le=MAX_SEED)

    @property
    def seed(self) -> int:
        return derive_seed(self.master_seed, self.stream_id)

    def generator(self) -> np.random.Generator:
        return generator_from_seed(self.seed)
