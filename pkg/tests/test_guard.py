from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secplf.errors import NonPositiveOracle, StaleBlock
from secplf.guard import PriceState, guarded_price, init_state

prices = st.fractions(min_value=Fraction(1, 100), max_value=10**6, max_denominator=1000)
epsilons = st.sampled_from([Fraction(5, 4), Fraction(2), Fraction(5)])


def test_fig1_cap():
    state, out = guarded_price(PriceState(0, Fraction(10)), 102020, 1, 5)
    assert state == PriceState(1, Fraction(50))
    assert out.price == 50
    assert out.updated


def test_same_block_identity():
    s = PriceState(3, Fraction(42))
    state, out = guarded_price(s, 42, 3, 5)
    assert state == s
    assert out.price == 42 and out.discrepancy == 0 and not out.updated


def test_downward_move_passes_through():
    state, out = guarded_price(PriceState(0, Fraction(100)), 80, 1, Fraction(5, 4))
    assert state.p == 80 and out.price == 80 and out.discrepancy == 0


def test_discrepancy_case():
    state, out = guarded_price(PriceState(0, Fraction(100)), 130, 1, Fraction(5, 4))
    assert state.p == 125 and out.price == 125 and out.discrepancy == 5


def test_init_state():
    assert init_state(10, 0) == PriceState(0, Fraction(10))
    assert init_state(1, 5) == PriceState(5, Fraction(1))
    with pytest.raises(NonPositiveOracle):
        init_state(0, 0)


def test_errors():
    with pytest.raises(NonPositiveOracle):
        guarded_price(PriceState(0, Fraction(1)), 0, 1, 2)
    with pytest.raises(StaleBlock):
        guarded_price(PriceState(5, Fraction(1)), 1, 4, 2)
    with pytest.raises(ValueError):
        guarded_price(PriceState(0, Fraction(1)), 1, 1, 1)


@given(prices, st.lists(prices, min_size=2, max_size=10), epsilons)
def test_at_most_one_update_per_block(p, oracles, eps):
    state = init_state(p, 0)
    changes = 0
    for o in oracles:
        new, out = guarded_price(state, o, 1, eps)
        changes += new != state
        state = new
        assert out.price == min(o, state.p)
        assert out.discrepancy == o - state.p
    assert changes <= 1


@given(prices, st.lists(prices, min_size=1, max_size=10), epsilons)
def test_output_capped(p, oracles, eps):
    state = init_state(p, 0)
    for o in oracles:
        state, out = guarded_price(state, o, 1, eps)
        assert out.price <= p * eps
        assert state.p <= p * eps


@given(prices, st.fractions(min_value=Fraction(1, 100), max_value=1, max_denominator=1000), epsilons)
def test_transparent_in_calm_markets(p, f, eps):
    oracle = p * eps * f
    state, out = guarded_price(init_state(p, 0), oracle, 1, eps)
    assert out.price == oracle and state.p == oracle


@given(prices, st.lists(prices, min_size=1, max_size=15), epsilons)
def test_stored_price_grows_at_most_eps_per_block(p, oracles, eps):
    state = init_state(p, 0)
    for block, o in enumerate(oracles, start=1):
        prev = state.p
        state, _ = guarded_price(state, o, block, eps)
        assert state.p <= prev * eps
        assert state.id == block
