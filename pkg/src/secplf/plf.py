"""Collateralization-safe lending protocol.

Positions hold one collateral asset and any number of loans. Borrowing is
allowed while ``collateral_value >= epsilon * loan_value``; a position that
drops below that line is liquidated in full. All values come from the PLF's
price source, which is either the raw oracle or the oracle passed through
the SecPLF guard (see :mod:`secplf.guard`).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    CollateralMismatch,
    GuardError,
    InsufficientPlfLiquidity,
    OverLimit,
    UnknownPosition,
    ZeroAmount,
)
from .guard import guarded_price
from .state import PriceMode, Position, WorldState

MAX = "max"


class PriceSource:
    """Prices for one transaction step.

    Each asset is queried at most once; in guarded mode the query goes through
    the guard and writes the updated guard state into ``state``, so ``state``
    must be a private working copy.
    """

    def __init__(self, state: WorldState, log: list | None = None):
        self.state = state
        self.log = log
        self._cache: dict[str, Fraction] = {}

    def __call__(self, asset: str) -> Fraction:
        if asset in self._cache:
            return self._cache[asset]
        state = self.state
        oracle = state.oracle_price(asset)
        record = {"asset": asset, "block": state.block, "oracle": oracle}
        if state.plf.params.price_mode is PriceMode.GUARDED:
            before = state.guards.get(asset)
            if before is None:
                raise GuardError(f"no guard state initialised for {asset!r}")
            after, out = guarded_price(before, oracle, state.block, state.plf.params.cap)
            state.guards[asset] = after
            price = out.price
            record.update(
                p_before=before.p,
                p_after=after.p,
                price=price,
                discrepancy=out.discrepancy,
                updated=out.updated,
            )
        else:
            price = oracle
            record["price"] = price
        if self.log is not None:
            self.log.append(record)
        self._cache[asset] = price
        return price


def _position(state: WorldState, owner: str) -> Position:
    try:
        return state.plf.positions[owner]
    except KeyError:
        raise UnknownPosition(f"{owner!r} has no PLF position") from None


def collateral_value(pos: Position, prices) -> Fraction:
    if pos.collateral_asset is None or pos.collateral_amount == 0:
        return Fraction(0)
    return pos.collateral_amount * prices(pos.collateral_asset)


def loan_value(pos: Position, prices) -> Fraction:
    return sum((amt * prices(asset) for asset, amt in sorted(pos.loans.items()) if amt), Fraction(0))


def _limit(pos: Position, epsilon: Fraction, prices) -> Fraction:
    headroom = collateral_value(pos, prices) / epsilon - loan_value(pos, prices)
    return max(headroom, Fraction(0))


def deposit(state: WorldState, owner: str, asset: str, amount) -> WorldState:
    amount = Fraction(amount)
    state.check_asset(asset)
    if amount <= 0:
        raise ZeroAmount(f"deposit must be positive, got {amount}")
    pos = state.plf.positions.get(owner)
    if pos is not None and pos.collateral_asset not in (None, asset) and pos.collateral_amount:
        raise CollateralMismatch(f"{owner} already posts {pos.collateral_asset} as collateral")

    state = state.copy()
    state.move(owner, state.plf.account, asset, amount)
    pos = state.plf.positions.setdefault(owner, Position(owner))
    pos.collateral_asset = asset
    pos.collateral_amount += amount
    return state


def borrow_limit_usd(state: WorldState, owner: str) -> Fraction:
    """Remaining USD borrowing capacity at the current price source.

    Read-only: any guard update triggered by the query is discarded.
    """
    work = state.copy()
    pos = _position(work, owner)
    return _limit(pos, work.plf.params.epsilon, PriceSource(work))


def _borrow(work: WorldState, prices: PriceSource, owner: str, asset: str, amount):
    """In-place borrow on a working copy. Returns ``(amount_borrowed, limit_usd)``."""
    work.check_asset(asset)
    pos = _position(work, owner)
    liquidity = work.balance(work.plf.account, asset)
    if amount != MAX and Fraction(amount) == 0:
        return Fraction(0), None

    limit = _limit(pos, work.plf.params.epsilon, prices)
    price = prices(asset)
    if amount == MAX:
        amount = min(limit / price, liquidity)
        if amount == 0:
            return amount, limit
    amount = Fraction(amount)
    if amount < 0:
        raise ZeroAmount(f"borrow amount must be non-negative, got {amount}")
    if amount * price > limit:
        raise OverLimit(
            f"borrow of {amount} {asset} (${amount * price}) exceeds limit ${limit}"
        )
    if liquidity < amount:
        raise InsufficientPlfLiquidity(f"PLF holds {liquidity} {asset}, asked {amount}")
    work.move(work.plf.account, owner, asset, amount)
    pos.loans[asset] = pos.loans.get(asset, Fraction(0)) + amount
    return amount, limit


def borrow(state: WorldState, owner: str, asset: str, amount, log: list | None = None) -> WorldState:
    """Borrow ``amount`` of ``asset`` (or :data:`MAX` for everything the limit allows)."""
    work = state.copy()
    _borrow(work, PriceSource(work, log), owner, asset, amount)
    return work


def _liquidate(work: WorldState, prices: PriceSource, owner: str) -> dict | None:
    pos = _position(work, owner)
    if not any(pos.loans.values()):
        return None
    c = collateral_value(pos, prices)
    l = loan_value(pos, prices)
    if c >= work.plf.params.epsilon * l:
        return None
    # full seizure: collateral stays in the PLF account, debt is written off
    event = {
        "owner": owner,
        "collateral_asset": pos.collateral_asset,
        "seized": pos.collateral_amount,
        "collateral_usd": c,
        "loan_usd": l,
    }
    pos.collateral_amount = Fraction(0)
    pos.loans.clear()
    return event


def check_and_liquidate(state: WorldState, owner: str, log: list | None = None) -> WorldState:
    work = state.copy()
    event = _liquidate(work, PriceSource(work, log), owner)
    if event is not None and log is not None:
        log.append({"liquidation": event})
    return work


def well_collateralized(state: WorldState, owner: str) -> bool:
    """``collateral >= epsilon * loans`` at the current price source (read-only)."""
    work = state.copy()
    pos = _position(work, owner)
    prices = PriceSource(work)
    return collateral_value(pos, prices) >= work.plf.params.epsilon * loan_value(pos, prices)
