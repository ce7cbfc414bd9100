from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secplf.amm import Pool, oracle_usd, pair_id, spot_price, swap_exact_in
from secplf.errors import NonPositiveOracle, UnknownAsset, ZeroAmount

POOL = Pool.create("A", "B", 100, 1000)

amounts = st.fractions(min_value=Fraction(1, 1000), max_value=10**6, max_denominator=10**6)


def test_first_fig1_swap():
    pool, out = swap_exact_in(POOL, "A", 100)
    assert out == 500
    assert (pool.reserve("A"), pool.reserve("B")) == (200, 500)


def test_second_fig1_swap_exact():
    pool, _ = swap_exact_in(POOL, "A", 100)
    pool, out = swap_exact_in(pool, "A", 9900)
    assert out == 500 - Fraction(100000, 10100)
    assert pool.reserve("A") == 10100
    assert pool.reserve("B") == Fraction(100000, 10100)
    assert round(float(out), 3) == 490.099


@pytest.mark.parametrize("asset", ["A", "B"])
def test_zero_swap_rejected(asset):
    with pytest.raises(ZeroAmount):
        swap_exact_in(POOL, asset, 0)


def test_unknown_asset():
    with pytest.raises(UnknownAsset):
        swap_exact_in(POOL, "C", 1)
    with pytest.raises(UnknownAsset):
        spot_price(POOL, "C", "A")


def test_spot_prices():
    assert spot_price(POOL, "B", "A") == Fraction(1, 10)
    assert spot_price(POOL, "A", "A") == 1
    distorted = Pool.create("A", "B", 10100, Fraction(100000, 10100))
    # 10100**2 / 100000, i.e. 1020.1 exactly
    assert spot_price(distorted, "B", "A") == Fraction(10100**2, 100000) == Fraction(10201, 10)
    assert spot_price(distorted, "B", "A") / spot_price(POOL, "B", "A") == 10201


def test_oracle_usd():
    assert oracle_usd(POOL, "B", 100) == 10
    distorted = Pool.create("A", "B", 10100, Fraction(100000, 10100))
    assert oracle_usd(distorted, "B", 100) == 102010
    with pytest.raises(NonPositiveOracle):
        oracle_usd(POOL, "B", 0)


def test_pair_is_unordered():
    assert pair_id("B", "A") == pair_id("A", "B") == ("A", "B")
    assert Pool.create("B", "A", 1000, 100) == POOL


def test_fee_multiplier_reduces_output():
    fee_pool = Pool.create("A", "B", 100, 1000, Fraction(997, 1000))
    _, out = swap_exact_in(fee_pool, "A", 100)
    assert out < 500
    with pytest.raises(ValueError):
        Pool.create("A", "B", 100, 1000, 0)
    with pytest.raises(ValueError):
        Pool.create("A", "B", 0, 1000)


@given(st.lists(st.tuples(st.sampled_from("AB"), amounts), min_size=1, max_size=20))
def test_product_preserved(swaps):
    pool = POOL
    for asset, amt in swaps:
        pool, out = swap_exact_in(pool, asset, amt)
        assert pool.k == POOL.k
        assert pool.reserve_x > 0 and pool.reserve_y > 0
        assert out > 0


@given(amounts)
def test_round_trip(x):
    pool, got_b = swap_exact_in(POOL, "A", x)
    pool, got_a = swap_exact_in(pool, "B", got_b)
    assert got_a == x
    assert pool == POOL


@given(amounts, amounts)
def test_buying_b_raises_its_price(x, y):
    pool, _ = swap_exact_in(POOL, "A", x)
    assert spot_price(pool, "B", "A") > spot_price(POOL, "B", "A")
    pool2, _ = swap_exact_in(pool, "A", y)
    assert spot_price(pool2, "B", "A") > spot_price(pool, "B", "A")
