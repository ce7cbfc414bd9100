"""Transaction step vocabulary.

Every step is a frozen dataclass with an ``apply(state, ctx)`` method that
returns a new state plus a :class:`StepRecord`. Amounts can be literal
numbers, :data:`ALL` (the sender's whole balance), or a :class:`StepOutput`
reference to an earlier step's output amount, which is how a pre-built
attack feeds the proceeds of one swap into the next step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import flash_loan, plf
from .amm import spot_price, swap_exact_in
from .errors import BadStepReference, InsufficientBalance, ZeroAmount
from .state import WorldState

ALL = "all"


@dataclass(frozen=True)
class StepOutput:
    """The ``amount`` output of step ``index`` in the same transaction."""

    index: int


@dataclass
class StepRecord:
    op: str
    inputs: dict[str, Any]
    outputs: dict[str, Any] = field(default_factory=dict)
    prices: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"op": self.op, "inputs": self.inputs, "outputs": self.outputs, "prices": self.prices}


@dataclass
class TxContext:
    sender: str
    records: list[StepRecord] = field(default_factory=list)
    # partial record of the step in flight, if it chose to expose one
    pending: StepRecord | None = None

    def output(self, index: int) -> Fraction:
        if not 0 <= index < len(self.records):
            raise BadStepReference(f"step {index} has not run yet")
        out = self.records[index].outputs.get("amount")
        if out is None:
            raise BadStepReference(f"step {index} ({self.records[index].op}) has no amount output")
        return out


def resolve_amount(spec, ctx: TxContext, state: WorldState, account: str, asset: str) -> Fraction:
    if isinstance(spec, StepOutput):
        return ctx.output(spec.index)
    if spec == ALL:
        return state.balance(account, asset)
    return Fraction(spec)


@dataclass(frozen=True)
class Transfer:
    op = "transfer"
    asset: str
    amount: Any
    to: str

    def apply(self, state: WorldState, ctx: TxContext):
        amount = resolve_amount(self.amount, ctx, state, ctx.sender, self.asset)
        if amount <= 0:
            raise ZeroAmount(f"transfer amount must be positive, got {amount}")
        work = state.copy()
        work.move(ctx.sender, self.to, self.asset, amount)
        rec = StepRecord(self.op, {"asset": self.asset, "to": self.to}, {"amount": amount})
        return work, rec


@dataclass(frozen=True)
class FlashBorrow:
    op = "flash_borrow"
    asset: str
    amount: Any

    def apply(self, state: WorldState, ctx: TxContext):
        amount = resolve_amount(self.amount, ctx, state, ctx.sender, self.asset)
        work = flash_loan.flash_borrow(state, ctx.sender, self.asset, amount)
        return work, StepRecord(self.op, {"asset": self.asset}, {"amount": amount})


@dataclass(frozen=True)
class FlashRepay:
    op = "flash_repay"
    asset: str
    amount: Any = None

    def apply(self, state: WorldState, ctx: TxContext):
        amount = None
        if self.amount is not None:
            amount = resolve_amount(self.amount, ctx, state, ctx.sender, self.asset)
        loan = state.flash.open_loans.get((ctx.sender, self.asset))
        work = flash_loan.flash_repay(state, ctx.sender, self.asset, amount)
        paid = amount if amount is not None else loan.required
        return work, StepRecord(self.op, {"asset": self.asset}, {"amount": paid})


@dataclass(frozen=True)
class Swap:
    op = "swap"
    asset_in: str
    asset_out: str
    amount: Any

    def apply(self, state: WorldState, ctx: TxContext):
        pool = state.pool(self.asset_in, self.asset_out)
        amount_in = resolve_amount(self.amount, ctx, state, ctx.sender, self.asset_in)
        if amount_in <= 0:
            raise ZeroAmount(f"swap input must be positive, got {amount_in}")
        have = state.balance(ctx.sender, self.asset_in)
        if have < amount_in:
            raise InsufficientBalance(f"{ctx.sender} holds {have} {self.asset_in}, swap needs {amount_in}")
        new_pool, out = swap_exact_in(pool, self.asset_in, amount_in)

        work = state.copy()
        work.debit(ctx.sender, self.asset_in, amount_in)
        work.credit(ctx.sender, self.asset_out, out)
        work.pools[pool.pair] = new_pool
        rec = StepRecord(
            self.op,
            {"asset_in": self.asset_in, "asset_out": self.asset_out, "amount_in": amount_in},
            {
                "amount": out,
                "reserves": {a: new_pool.reserve(a) for a in new_pool.pair},
                # price of the bought asset in units of the sold one
                "spot_before": spot_price(pool, self.asset_out, self.asset_in),
                "spot_after": spot_price(new_pool, self.asset_out, self.asset_in),
            },
        )
        return work, rec


@dataclass(frozen=True)
class Deposit:
    op = "deposit"
    asset: str
    amount: Any

    def apply(self, state: WorldState, ctx: TxContext):
        amount = resolve_amount(self.amount, ctx, state, ctx.sender, self.asset)
        work = plf.deposit(state, ctx.sender, self.asset, amount)
        pos = work.plf.positions[ctx.sender]
        rec = StepRecord(
            self.op, {"asset": self.asset}, {"amount": amount, "collateral": pos.collateral_amount}
        )
        return work, rec


@dataclass(frozen=True)
class Borrow:
    op = "borrow"
    asset: str
    amount: Any = plf.MAX

    def apply(self, state: WorldState, ctx: TxContext):
        amount = self.amount
        if amount != plf.MAX:
            amount = resolve_amount(amount, ctx, state, ctx.sender, self.asset)
        work = state.copy()
        log: list[dict] = []
        rec = StepRecord(self.op, {"asset": self.asset, "requested": amount}, prices=log)
        # lets the ledger keep the guard readings when the borrow fails
        ctx.pending = rec
        got, limit = plf._borrow(work, plf.PriceSource(work, log), ctx.sender, self.asset, amount)
        ctx.pending = None
        rec.outputs = {"amount": got, "limit_usd": limit}
        return work, rec


@dataclass(frozen=True)
class CoverShortfall:
    """Buy ``buy_asset`` at reference USD prices from a fixed-rate venue until
    the sender holds ``target`` of it, paying in ``pay_asset``.

    If the sender cannot afford the full shortfall it buys what it can; the
    venue never fails the step, so any remaining gap surfaces later (e.g. at
    flash-loan repayment).
    """

    op = "cover_shortfall"
    buy_asset: str
    pay_asset: str
    target: Any
    venue: str = "otc"

    def apply(self, state: WorldState, ctx: TxContext):
        target = resolve_amount(self.target, ctx, state, ctx.sender, self.buy_asset)
        state.check_asset(self.buy_asset)
        state.check_asset(self.pay_asset)
        rate = state.assets[self.buy_asset] / state.assets[self.pay_asset]
        need = max(target - state.balance(ctx.sender, self.buy_asset), Fraction(0))
        can_afford = state.balance(ctx.sender, self.pay_asset) / rate
        bought = min(need, can_afford, state.balance(self.venue, self.buy_asset))
        paid = bought * rate

        work = state.copy()
        if bought:
            work.move(ctx.sender, self.venue, self.pay_asset, paid)
            work.move(self.venue, ctx.sender, self.buy_asset, bought)
        rec = StepRecord(
            self.op,
            {"buy_asset": self.buy_asset, "pay_asset": self.pay_asset, "target": target, "venue": self.venue},
            {"amount": bought, "paid": paid, "shortfall_left": need - bought},
        )
        return work, rec


@dataclass(frozen=True)
class Liquidate:
    op = "liquidate"
    owner: str | None = None

    def apply(self, state: WorldState, ctx: TxContext):
        owner = self.owner or ctx.sender
        log: list[dict] = []
        work = plf.check_and_liquidate(state, owner, log)
        events = [r["liquidation"] for r in log if "liquidation" in r]
        prices = [r for r in log if "liquidation" not in r]
        seized = events[0]["seized"] if events else Fraction(0)
        rec = StepRecord(self.op, {"owner": owner}, {"amount": seized, "liquidated": bool(events)}, prices)
        return work, rec


STEP_TYPES = {cls.op: cls for cls in (Transfer, FlashBorrow, FlashRepay, Swap, Deposit, Borrow, CoverShortfall, Liquidate)}
