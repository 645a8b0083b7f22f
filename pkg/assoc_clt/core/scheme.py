"""
Blocking arithmetic: the decomposition n = m*l + r and the rules that pick l(n).
"""

import math
from typing import Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .exceptions import InvalidSchemeError, UnknownComponentError

# Keeps floor(n ** alpha) from landing one below an exact integer power.
_POW_GUARD = 1e-12


class BlockScheme(BaseModel):
    """n = m * ell + r with 0 <= r < ell, ell >= 1, m >= 1."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Sequence length")
    ell: int = Field(..., ge=1, description="Block length l(n)")
    m: int = Field(..., ge=1, description="Number of full blocks m(n)")
    r: int = Field(..., ge=0, description="Tail length r(n)")

    @model_validator(mode="after")
    def _check_decomposition(self) -> "BlockScheme":
        if self.m * self.ell + self.r != self.n:
            raise ValueError(f"m*ell + r = {self.m * self.ell + self.r} != n = {self.n}")
        if self.r >= self.ell:
            raise ValueError(f"tail r = {self.r} must be < ell = {self.ell}")
        return self

    @property
    def covered(self) -> int:
        """Number of indices covered by full blocks (m * ell)."""
        return self.m * self.ell

    def block_bounds(self, j: int) -> "tuple[int, int]":
        """0-based half-open index range of block j (1-based, j <= m + 1)."""
        if not 1 <= j <= self.m + 1:
            raise IndexError(f"block index {j} outside 1..{self.m + 1}")
        start = (j - 1) * self.ell
        stop = self.n if j == self.m + 1 else start + self.ell
        return start, stop


class BlockRule(BaseModel):
    """
    Schedule n -> l(n).

    Rules:
        power: l(n) = max(1, floor(n ** alpha)), 0 < alpha < 1
        fixed: l(n) = ell0
        table: explicit mapping n -> l(n)
    """

    model_config = ConfigDict(frozen=True)

    rule: Literal["power", "fixed", "table"] = Field(default="power", description="Rule kind")
    alpha: float = Field(default=0.5, gt=0.0, lt=1.0, description="Exponent of the power rule")
    ell0: Optional[int] = Field(default=None, ge=1, description="Block length of the fixed rule")
    table: Optional[Dict[int, int]] = Field(default=None, description="Explicit n -> l(n) table")

    @model_validator(mode="after")
    def _check_rule(self) -> "BlockRule":
        if self.rule == "fixed" and self.ell0 is None:
            raise ValueError("fixed rule requires ell0")
        if self.rule == "table":
            if not self.table:
                raise ValueError("table rule requires a non-empty table")
            bad = {n: ell for n, ell in self.table.items() if n < 1 or ell < 1}
            if bad:
                raise ValueError(f"table entries must be positive, got {bad}")
        return self

    def ell(self, n: int) -> int:
        """Block length for sequence length n."""
        if self.rule == "power":
            return max(1, int(math.floor(n ** self.alpha * (1.0 + _POW_GUARD))))
        if self.rule == "fixed":
            return int(self.ell0)  # type: ignore[arg-type]
        if n not in self.table:  # type: ignore[operator]
            raise InvalidSchemeError(f"block table has no entry for n = {n}")
        return int(self.table[n])  # type: ignore[index]

    def describe(self) -> str:
        if self.rule == "power":
            return f"power:{self.alpha!r}"
        if self.rule == "fixed":
            return f"fixed:{self.ell0}"
        return "table:" + "/".join(f"{n}={ell}" for n, ell in sorted(self.table.items()))  # type: ignore[union-attr]


def make_block_scheme(n: int, rule: BlockRule) -> BlockScheme:
    """
    Decompose n into m blocks of length l(n) plus a tail.

    Args:
        n: Sequence length (>= 1)
        rule: Block length schedule

    Returns:
        BlockScheme with ell = rule(n), m = n // ell, r = n - m*ell

    Raises:
        InvalidSchemeError: If n < 1 or l(n) > n (m would be 0; never clamped)
    """
    if n < 1:
        raise InvalidSchemeError(f"n must be >= 1, got {n}")
    ell = rule.ell(n)
    m, r = divmod(n, ell)
    if m < 1:
        raise InvalidSchemeError(
            f"block length l({n}) = {ell} exceeds n; scheme needs m >= 1"
        )
    return BlockScheme(n=n, ell=ell, m=m, r=r)


def parse_block_rule(text: str) -> BlockRule:
    """
    Parse the block rule grammar.

    Examples:
        "power:0.5", "fixed:10", "table:100=10/200=14"
    """
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    try:
        if name == "power":
            return BlockRule(rule="power", alpha=float(arg) if arg else 0.5)
        if name == "fixed":
            return BlockRule(rule="fixed", ell0=int(arg))
        if name == "table":
            table = {}
            for item in arg.split("/"):
                n, _, ell = item.partition("=")
                table[int(n)] = int(ell)
            return BlockRule(rule="table", table=table)
    except ValueError as e:
        raise InvalidSchemeError(f"Malformed block rule '{text}': {e}") from e
    raise UnknownComponentError("block rule", name, ["power", "fixed", "table"])
