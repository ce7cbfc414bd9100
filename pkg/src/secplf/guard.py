"""SecPLF price guard.

Each asset carries a stored state ``(id, p)``: the block index of the last
update and the last stored USD price. The first oracle reading in a new
block moves the stored price to ``min(oracle, p * epsilon)``; the price
handed to the lending protocol is ``min(oracle, stored p)``. Since every
step of a transaction shares one block index, the stored price moves at
most once per transaction and by at most a factor of ``epsilon``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NonPositiveOracle, StaleBlock


@dataclass(frozen=True)
class PriceState:
    id: int
    p: Fraction


@dataclass(frozen=True)
class GuardOutput:
    price: Fraction
    # oracle minus stored price; positive means the guard is lagging the market
    discrepancy: Fraction
    updated: bool


def init_state(oracle, block: int) -> PriceState:
    oracle = Fraction(oracle)
    if oracle <= 0:
        raise NonPositiveOracle(f"oracle price must be positive, got {oracle}")
    return PriceState(int(block), oracle)


def guarded_price(state: PriceState, oracle, block: int, epsilon) -> tuple[PriceState, GuardOutput]:
    oracle = Fraction(oracle)
    epsilon = Fraction(epsilon)
    if oracle <= 0:
        raise NonPositiveOracle(f"oracle price must be positive, got {oracle}")
    if epsilon <= 1:
        raise ValueError(f"epsilon must exceed 1, got {epsilon}")
    if block < state.id:
        raise StaleBlock(f"block {block} precedes stored state block {state.id}")

    updated = block > state.id
    if updated:
        state = PriceState(block, min(oracle, state.p * epsilon))
    out = GuardOutput(price=min(oracle, state.p), discrepancy=oracle - state.p, updated=updated)
    return state, out
