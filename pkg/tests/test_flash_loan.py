from fractions import Fraction

import pytest

from secplf.errors import (
    DuplicateLoan,
    InsufficientBalance,
    InsufficientProviderReserve,
    InsufficientRepayment,
    NoOpenLoan,
    OpenLoanAtCommit,
    ZeroAmount,
)
from secplf.flash_loan import assert_no_open_loans, flash_borrow, flash_repay
from secplf.state import FlashProvider


@pytest.fixture
def world(fig1):
    return fig1.state_for()


def test_borrow_and_repay(world):
    s = flash_borrow(world, "eve", "A", 10000)
    assert s.balance("eve", "A") == 10000
    assert ("eve", "A") in s.flash.open_loans
    with pytest.raises(OpenLoanAtCommit):
        assert_no_open_loans(s)
    s = flash_repay(s, "eve", "A", 10000)
    assert not s.flash.open_loans
    assert_no_open_loans(s)
    assert s == world


def test_degenerate_borrows(world):
    with pytest.raises(ZeroAmount):
        flash_borrow(world, "eve", "A", 0)
    with pytest.raises(InsufficientProviderReserve):
        flash_borrow(world, "eve", "A", 10**7)
    s = flash_borrow(world, "eve", "A", 1)
    with pytest.raises(DuplicateLoan):
        flash_borrow(s, "eve", "A", 1)


def test_repay_short(world):
    s = flash_borrow(world, "eve", "A", 10000)
    s.debit("eve", "A", 100)
    with pytest.raises(InsufficientBalance):
        flash_repay(s, "eve", "A", 10000)
    with pytest.raises(InsufficientRepayment):
        flash_repay(s, "eve", "A", 9900)
    with pytest.raises(NoOpenLoan):
        flash_repay(world, "eve", "A", 1)


def test_fee(world):
    world.flash = FlashProvider(fee_rate=Fraction(1, 1000))
    world.credit("eve", "A", 10)
    s = flash_borrow(world, "eve", "A", 10000)
    assert s.flash.open_loans[("eve", "A")].required == 10010
    s = flash_repay(s, "eve", "A")
    assert s.balance("flash", "A") == world.balance("flash", "A") + 10
    assert s.balance("eve", "A") == 0
