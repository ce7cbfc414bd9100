"""World state shared by the ledger, AMM, flash-loan provider, PLF and guard.

A :class:`WorldState` is treated as a value: public operations never mutate
their input, they return a modified deep copy. That is what makes
transaction revert trivial (keep the pre-state) and lets committed states be
shared read-only.
"""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .amm import PairId, Pool, oracle_usd, pair_id
from .errors import InsufficientBalance, UnknownAsset, UnknownPool, ZeroAmount
from .guard import PriceState

USD = "USD"


class PriceMode(str, enum.Enum):
    RAW = "raw"
    GUARDED = "guarded"


@dataclass(frozen=True)
class FixedFeed:
    """Oracle reporting a constant USD price."""

    usd: Fraction

    def read(self, state: WorldState, asset: str) -> Fraction:
        return self.usd


@dataclass(frozen=True)
class PoolFeed:
    """Oracle derived from an AMM pool's reserve ratio against a numeraire."""

    pair: PairId
    numeraire: str
    numeraire_usd: Fraction

    def read(self, state: WorldState, asset: str) -> Fraction:
        pool = state.pool(*self.pair)
        return oracle_usd(pool, asset, self.numeraire_usd)


Feed = FixedFeed | PoolFeed


@dataclass(frozen=True)
class PlfParams:
    epsilon: Fraction
    price_mode: PriceMode = PriceMode.RAW
    # Growth cap used by the guard; None means reuse epsilon.
    guard_epsilon: Fraction | None = None

    def __post_init__(self):
        if self.epsilon <= 1:
            raise ValueError(f"epsilon must exceed 1, got {self.epsilon}")
        if self.guard_epsilon is not None and self.guard_epsilon <= 1:
            raise ValueError(f"guard_epsilon must exceed 1, got {self.guard_epsilon}")

    @property
    def cap(self) -> Fraction:
        return self.epsilon if self.guard_epsilon is None else self.guard_epsilon


@dataclass
class Position:
    owner: str
    collateral_asset: str | None = None
    collateral_amount: Fraction = Fraction(0)
    loans: dict[str, Fraction] = field(default_factory=dict)


@dataclass
class PlfState:
    params: PlfParams
    account: str = "plf"
    feeds: dict[str, Feed] = field(default_factory=dict)
    positions: dict[str, Position] = field(default_factory=dict)


@dataclass(frozen=True)
class FlashLoan:
    borrower: str
    asset: str
    principal: Fraction
    fee_rate: Fraction

    @property
    def required(self) -> Fraction:
        return self.principal * (1 + self.fee_rate)


@dataclass
class FlashProvider:
    account: str = "flash"
    fee_rate: Fraction = Fraction(0)
    open_loans: dict[tuple[str, str], FlashLoan] = field(default_factory=dict)


@dataclass
class WorldState:
    # asset -> USD reference price; also the registry of known assets
    assets: dict[str, Fraction]
    balances: dict[tuple[str, str], Fraction] = field(default_factory=dict)
    pools: dict[PairId, Pool] = field(default_factory=dict)
    plf: PlfState = field(default_factory=lambda: PlfState(PlfParams(Fraction(5))))
    flash: FlashProvider = field(default_factory=FlashProvider)
    guards: dict[str, PriceState] = field(default_factory=dict)
    block: int = 0

    def copy(self) -> WorldState:
        return copy.deepcopy(self)

    def check_asset(self, asset: str) -> None:
        if asset not in self.assets:
            raise UnknownAsset(f"unknown asset {asset!r}")

    def pool(self, a: str, b: str) -> Pool:
        try:
            return self.pools[pair_id(a, b)]
        except KeyError:
            raise UnknownPool(f"no pool for {a}/{b}") from None

    def balance(self, account: str, asset: str) -> Fraction:
        return self.balances.get((account, asset), Fraction(0))

    # The two mutators below are for building states and for code that has
    # already taken a private copy.
    def credit(self, account: str, asset: str, amount: Fraction) -> None:
        self.check_asset(asset)
        amount = Fraction(amount)
        if amount < 0:
            raise ValueError("credit amount must be non-negative")
        if amount:
            self.balances[(account, asset)] = self.balance(account, asset) + amount

    def debit(self, account: str, asset: str, amount: Fraction) -> None:
        self.check_asset(asset)
        amount = Fraction(amount)
        if amount < 0:
            raise ValueError("debit amount must be non-negative")
        have = self.balance(account, asset)
        if have < amount:
            raise InsufficientBalance(f"{account} holds {have} {asset}, needs {amount}")
        left = have - amount
        # zero balances are dropped so equal states compare equal
        if left:
            self.balances[(account, asset)] = left
        else:
            self.balances.pop((account, asset), None)

    def move(self, src: str, dst: str, asset: str, amount: Fraction) -> None:
        self.debit(src, asset, amount)
        self.credit(dst, asset, amount)

    def total_supply(self, asset: str) -> Fraction:
        total = sum((v for (_, a), v in self.balances.items() if a == asset), Fraction(0))
        for pool in self.pools.values():
            if asset in pool.pair:
                total += pool.reserve(asset)
        return total

    def holdings(self, account: str) -> dict[str, Fraction]:
        return {a: v for (acct, a), v in sorted(self.balances.items()) if acct == account}

    def oracle_price(self, asset: str) -> Fraction:
        """Raw USD oracle price the PLF would receive for ``asset``."""
        try:
            feed = self.plf.feeds[asset]
        except KeyError:
            raise UnknownAsset(f"PLF has no price feed for {asset!r}") from None
        return feed.read(self, asset)


def transfer(state: WorldState, src: str, dst: str, asset: str, amount) -> WorldState:
    amount = Fraction(amount)
    if amount <= 0:
        raise ZeroAmount(f"transfer amount must be positive, got {amount}")
    state = state.copy()
    state.move(src, dst, asset, amount)
    return state
