"""Flash-loan provider: lend inside a transaction, demand repayment before commit."""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    DuplicateLoan,
    InsufficientBalance,
    InsufficientProviderReserve,
    InsufficientRepayment,
    NoOpenLoan,
    OpenLoanAtCommit,
    ZeroAmount,
)
from .state import FlashLoan, WorldState


def flash_borrow(state: WorldState, borrower: str, asset: str, amount) -> WorldState:
    amount = Fraction(amount)
    state.check_asset(asset)
    if amount <= 0:
        raise ZeroAmount(f"flash loan amount must be positive, got {amount}")
    provider = state.flash
    if (borrower, asset) in provider.open_loans:
        raise DuplicateLoan(f"{borrower} already has an open {asset} flash loan")
    reserve = state.balance(provider.account, asset)
    if reserve < amount:
        raise InsufficientProviderReserve(f"provider holds {reserve} {asset}, asked {amount}")

    state = state.copy()
    state.move(state.flash.account, borrower, asset, amount)
    state.flash.open_loans[(borrower, asset)] = FlashLoan(borrower, asset, amount, provider.fee_rate)
    return state


def flash_repay(state: WorldState, borrower: str, asset: str, amount=None) -> WorldState:
    """Close the open loan. ``amount`` defaults to principal plus fee."""
    loan = state.flash.open_loans.get((borrower, asset))
    if loan is None:
        raise NoOpenLoan(f"{borrower} has no open {asset} flash loan")
    amount = loan.required if amount is None else Fraction(amount)
    if amount < loan.required:
        raise InsufficientRepayment(f"repayment {amount} {asset} below required {loan.required}")
    have = state.balance(borrower, asset)
    if have < amount:
        raise InsufficientBalance(
            f"cannot repay flash loan: {borrower} holds {have} {asset}, owes {amount}"
        )

    state = state.copy()
    state.move(borrower, state.flash.account, asset, amount)
    del state.flash.open_loans[(borrower, asset)]
    return state


def assert_no_open_loans(state: WorldState) -> None:
    if state.flash.open_loans:
        (borrower, asset), loan = next(iter(state.flash.open_loans.items()))
        raise OpenLoanAtCommit(
            f"{len(state.flash.open_loans)} flash loan(s) still open at commit, "
            f"e.g. {loan.principal} {asset} to {borrower}"
        )
