"""
Batteries of nondecreasing test-function pairs.
"""

import logging
from typing import Iterator, List

from ..generators.transforms import MonotoneMap, check_map, create_map

logger = logging.getLogger(__name__)


class MonotonePair:
    """A pair (f, g) of nondecreasing maps with recorded derivative bounds."""

    def __init__(self, f: MonotoneMap, g: MonotoneMap, name: str = ""):
        self.f = f
        self.g = g
        self.name = name or f"{f.name}/{g.name}"

    @property
    def bound(self) -> float:
        """||f'||_inf * ||g'||_inf."""
        return self.f.sup_derivative * self.g.sup_derivative

    def __repr__(self) -> str:
        return f"MonotonePair({self.name}, bound={self.bound:g})"


class MonotoneTestBattery:
    """
    An ordered list of test-function pairs.

    Used both by the functional covariance inequality (pairs applied to two
    scalar variables) and by the association probe (pairs composed with
    coordinatewise nondecreasing statistics of a path).
    """

    def __init__(self, pairs: List[MonotonePair]):
        if not pairs:
            raise ValueError("a battery needs at least one pair")
        self.pairs = list(pairs)

    def __iter__(self) -> Iterator[MonotonePair]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def verify(self, lo: float = -10.0, hi: float = 10.0, points: int = 20001) -> List[str]:
        """
        Check every map on a dense grid.

        Returns:
            Names of pairs with a decreasing map or a violated derivative bound
        """
        bad = []
        for pair in self.pairs:
            if not (check_map(pair.f, lo, hi, points) and check_map(pair.g, lo, hi, points)):
                logger.warning("Battery pair %s failed the monotonicity check", pair.name)
                bad.append(pair.name)
        return bad


def default_battery() -> MonotoneTestBattery:
    """Pairs used by the association probe."""
    identity = create_map("identity")
    return MonotoneTestBattery(
        [
            MonotonePair(identity, identity),
            MonotonePair(create_map("tanh"), create_map("tanh")),
            MonotonePair(create_map("clip", lo=-1.0, hi=1.0), identity),
            MonotonePair(create_map("clip", lo=0.0, hi=0.5), create_map("clip", lo=-0.5, hi=0.0)),
        ]
    )


def lemma_battery() -> MonotoneTestBattery:
    """Pairs with bounded derivatives for the functional covariance inequality."""
    return MonotoneTestBattery(
        [
            MonotonePair(create_map("identity"), create_map("identity")),
            MonotonePair(create_map("tanh"), create_map("tanh")),
            MonotonePair(create_map("tanh", scale=2.0), create_map("affine", slope=0.5)),
            MonotonePair(
                create_map("piecewise_linear", xs=[-2.0, 0.0, 1.0], ys=[-1.0, 0.0, 2.0]),
                create_map("clip", lo=-1.0, hi=1.0),
            ),
        ]
    )
