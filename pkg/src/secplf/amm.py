"""Constant-product AMM pool (x * y = k) with exact rational reserves."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DrainedPool, NonPositiveOracle, UnknownAsset, ZeroAmount

PairId = tuple[str, str]


def pair_id(a: str, b: str) -> PairId:
    """Canonical (sorted) key for the unordered asset pair."""
    if a == b:
        raise ValueError(f"a pool needs two distinct assets, got {a!r} twice")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Pool:
    asset_x: str
    asset_y: str
    reserve_x: Fraction
    reserve_y: Fraction
    # Fraction of the input that counts toward the invariant; 1 means no fee.
    fee_multiplier: Fraction = Fraction(1)

    def __post_init__(self):
        if self.asset_x == self.asset_y:
            raise ValueError("pool assets must differ")
        if self.reserve_x <= 0 or self.reserve_y <= 0:
            raise ValueError("pool reserves must be strictly positive")
        if not 0 < self.fee_multiplier <= 1:
            raise ValueError("fee_multiplier must lie in (0, 1]")

    @classmethod
    def create(cls, a: str, b: str, reserve_a, reserve_b, fee_multiplier=1) -> Pool:
        ra, rb = Fraction(reserve_a), Fraction(reserve_b)
        if a > b:
            a, b, ra, rb = b, a, rb, ra
        return cls(a, b, ra, rb, Fraction(fee_multiplier))

    @property
    def pair(self) -> PairId:
        return (self.asset_x, self.asset_y)

    @property
    def k(self) -> Fraction:
        return self.reserve_x * self.reserve_y

    def reserve(self, asset: str) -> Fraction:
        if asset == self.asset_x:
            return self.reserve_x
        if asset == self.asset_y:
            return self.reserve_y
        raise UnknownAsset(f"{asset!r} is not in pool {self.asset_x}/{self.asset_y}")

    def other(self, asset: str) -> str:
        self.reserve(asset)
        return self.asset_y if asset == self.asset_x else self.asset_x

    def with_reserves(self, **reserves: Fraction) -> Pool:
        rx = reserves.get(self.asset_x, self.reserve_x)
        ry = reserves.get(self.asset_y, self.reserve_y)
        return Pool(self.asset_x, self.asset_y, rx, ry, self.fee_multiplier)


def swap_exact_in(pool: Pool, asset_in: str, amount_in) -> tuple[Pool, Fraction]:
    """Sell ``amount_in`` of ``asset_in`` into the pool.

    Returns the new pool and the amount of the other asset paid out,
    ``r_out - k / (r_in + amount_in)`` in the zero-fee case.
    """
    amount_in = Fraction(amount_in)
    r_in = pool.reserve(asset_in)
    asset_out = pool.other(asset_in)
    r_out = pool.reserve(asset_out)
    if amount_in <= 0:
        raise ZeroAmount(f"swap input must be positive, got {amount_in}")

    effective = amount_in * pool.fee_multiplier
    amount_out = r_out - (r_in * r_out) / (r_in + effective)
    if amount_out >= r_out:
        raise DrainedPool(f"swap would drain {asset_out} reserve")

    new_pool = pool.with_reserves(**{asset_in: r_in + amount_in, asset_out: r_out - amount_out})
    return new_pool, amount_out


def spot_price(pool: Pool, priced: str, numeraire: str) -> Fraction:
    """Units of ``numeraire`` per unit of ``priced`` at the current reserves."""
    r_priced = pool.reserve(priced)
    r_num = pool.reserve(numeraire)
    return r_num / r_priced


def oracle_usd(pool: Pool, priced: str, numeraire_price_usd) -> Fraction:
    """USD price of ``priced`` read off the pool, given the numeraire's USD price."""
    numeraire_price_usd = Fraction(numeraire_price_usd)
    if numeraire_price_usd <= 0:
        raise NonPositiveOracle(f"numeraire price must be positive, got {numeraire_price_usd}")
    return spot_price(pool, priced, pool.other(priced)) * numeraire_price_usd
