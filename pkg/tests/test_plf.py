from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secplf import plf
from secplf.errors import InsufficientPlfLiquidity, OverLimit, UnknownPosition, ZeroAmount
from secplf.guard import init_state
from secplf.ledger import Transaction, execute_transaction
from secplf.state import FixedFeed, PlfParams, PlfState, PriceMode, WorldState
from secplf.steps import Liquidate


def lending_world(eps=Fraction(5, 4), b_price=1, mode=PriceMode.RAW) -> WorldState:
    s = WorldState(assets={"B": Fraction(1), "C": Fraction(1)})
    s.plf = PlfState(PlfParams(Fraction(eps), mode), feeds={"B": FixedFeed(Fraction(b_price)), "C": FixedFeed(Fraction(1))})
    for a in ("B", "C"):
        s.guards[a] = init_state(s.oracle_price(a), 0)
    s.credit("plf", "C", 10**6)
    s.credit("u", "B", 10**4)
    return s


def test_deposit(raw_state):
    s = raw_state.copy()
    s.credit("u", "B", 500)
    s = plf.deposit(s, "u", "B", 500)
    assert s.plf.positions["u"].collateral_amount == 500
    t = plf.deposit(plf.deposit(_with_b(raw_state), "u", "B", 250), "u", "B", 250)
    assert t.plf.positions["u"].collateral_amount == 500
    with pytest.raises(ZeroAmount):
        plf.deposit(s, "u", "B", 0)


def _with_b(state):
    s = state.copy()
    s.credit("u", "B", 500)
    return s


def test_borrow_limit_honest(raw_state):
    s = plf.deposit(_with_b(raw_state), "u", "B", 500)
    assert plf.borrow_limit_usd(s, "u") == 1000
    with pytest.raises(UnknownPosition):
        plf.borrow_limit_usd(s, "nobody")


def test_borrow_limit_at_distorted_price(raw_state):
    s = plf.deposit(_with_b(raw_state), "u", "B", 500)
    s.pools[("A", "B")] = s.pools[("A", "B")].with_reserves(A=Fraction(10100), B=Fraction(100000, 10100))
    assert s.oracle_price("B") == 102010
    assert plf.borrow_limit_usd(s, "u") == 10201000
    # the same limit with theta rounded to 10,202
    assert Fraction(10) * 500 * 10202 / 5 == 10202000


def test_zero_collateral_limit():
    s = lending_world()
    s = plf.deposit(s, "u", "B", 100)
    s.plf.positions["u"].collateral_amount = Fraction(0)
    assert plf.borrow_limit_usd(s, "u") == 0


def test_borrow_zero_is_noop():
    s = plf.deposit(lending_world(), "u", "B", 100)
    assert plf.borrow(s, "u", "C", 0) == s


def test_borrow_over_limit_and_liquidity():
    s = plf.deposit(lending_world(), "u", "B", 1000)
    s = plf.borrow(s, "u", "C", 800)
    assert s.balance("u", "C") == 800
    with pytest.raises(OverLimit):
        plf.borrow(s, "u", "C", 1)
    w = lending_world()
    w.debit("plf", "C", 10**6 - 5)
    w = plf.deposit(w, "u", "B", 1000)
    with pytest.raises(InsufficientPlfLiquidity):
        plf.borrow(w, "u", "C", 10)
    assert plf.borrow(w, "u", "C", plf.MAX).balance("u", "C") == 5


def test_guarded_borrow_rejected(guarded_state):
    s = plf.deposit(_with_b(guarded_state), "u", "B", 500)
    s.pools[("A", "B")] = s.pools[("A", "B")].with_reserves(A=Fraction(10100), B=Fraction(100000, 10100))
    assert plf.borrow_limit_usd(s, "u") == 5000
    with pytest.raises(OverLimit):
        plf.borrow(s, "u", "C", 10202000)
    log = []
    s2 = plf.borrow(s, "u", "C", 5000, log)
    assert s2.guards["B"].p == 50 and s.guards["B"].p == 10
    assert log[0]["price"] == 50


def test_liquidation_rule():
    s = plf.deposit(lending_world(), "u", "B", 1000)
    s = plf.borrow(s, "u", "C", 300)
    assert plf.check_and_liquidate(s, "u") == s
    assert plf.well_collateralized(s, "u")
    s.plf.feeds["B"] = FixedFeed(Fraction(3, 10))
    assert not plf.well_collateralized(s, "u")
    log = []
    after = plf.check_and_liquidate(s, "u", log)
    assert after.plf.positions["u"].collateral_amount == 0
    assert not after.plf.positions["u"].loans
    assert log[-1]["liquidation"]["seized"] == 1000


def test_no_loans_never_liquidates():
    s = plf.deposit(lending_world(), "u", "B", 1000)
    s.plf.feeds["B"] = FixedFeed(Fraction(1, 10**9))
    assert plf.check_and_liquidate(s, "u") == s


def test_attack_leaves_position_under_water(raw_state, fig1):
    from secplf.adversary import run_attack

    after, report, _ = run_attack(raw_state, fig1.attack)
    assert report.outcome.value == "success"
    assert not plf.well_collateralized(after, "attacker")
    keeper, out = execute_transaction(after, Transaction([Liquidate("attacker")], after.block, "keeper"))
    assert out.ok and out.trace[0].outputs["liquidated"]
    assert keeper.plf.positions["attacker"].collateral_amount == 0


@given(st.integers(1, 10**6), st.sampled_from([Fraction(5, 4), Fraction(2), Fraction(5)]))
def test_limit_homogeneous_and_inverse_in_eps(amount, eps):
    s = plf.deposit(lending_world(eps, b_price=3), "u", "B", min(amount, 10**4))
    limit = plf.borrow_limit_usd(s, "u")
    doubled = s.copy()
    doubled.plf.positions["u"].collateral_amount *= 2
    assert plf.borrow_limit_usd(doubled, "u") == 2 * limit
    other = s.copy()
    other.plf.params = PlfParams(eps * 2)
    assert plf.borrow_limit_usd(other, "u") == limit / 2
