"""Flash-loan-driven oracle-manipulation attack.

The attack transaction, in order:

1. flash-borrow X of the flash asset (A)
2. swap a small part of it for the collateral asset (B)
3. deposit all of that B as collateral
4. swap the rest of the flash loan into the same pool, inflating B's price
5. borrow the loan asset (C) up to the now-inflated limit
6. swap the B bought in step 4 back to A
7. buy the remaining A shortfall with C at reference prices
8. repay the flash loan

Two profit figures are reported. ``predicted_g_usd`` is the closed form
``O_B * Y * (theta / eps - 1)``, which charges the attack the market value of
the deposited collateral. ``realized_profit_usd`` is the attacker's
committed balance change at pre-attack reference prices, which charges what
was actually spent buying back A. They differ by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .amm import PairId, pair_id, spot_price
from .errors import InvalidPlan
from .jsonutil import opt_fraction, to_jsonable
from .ledger import Status, Transaction, TxOutcome, execute_transaction
from .plf import MAX
from .state import WorldState
from .steps import Borrow, CoverShortfall, Deposit, FlashBorrow, FlashRepay, StepOutput, Swap

DISCREPANCY_NOTE = (
    "predicted_g_usd uses the closed form O_B*Y*(theta/eps - 1), costing the attack at the "
    "market value of the deposited collateral; realized_profit_usd is the attacker's committed "
    "balance change at pre-attack prices, costing it at the A actually bought back to repay "
    "the flash loan. Locked collateral is counted at zero and the loan is never repaid."
)

# step indices inside the built transaction
SWAP_COLLATERAL, DEPOSIT, SWAP_DISTORT, BORROW = 1, 2, 3, 4


@dataclass(frozen=True)
class AttackPlan:
    flash_amount: Fraction
    collateral_swap_in: Fraction
    flash_asset: str = "A"
    deposit_asset: str = "B"
    borrow_asset: str = "C"
    # MAX borrows everything the PLF allows
    borrow_amount: Fraction | str = MAX
    attacker: str = "attacker"
    venue: str = "otc"

    @property
    def pool(self) -> PairId:
        return pair_id(self.flash_asset, self.deposit_asset)

    def validate(self) -> None:
        x, s = Fraction(self.flash_amount), Fraction(self.collateral_swap_in)
        if x <= 0:
            raise InvalidPlan(f"flash amount must be positive, got {x}")
        if s <= 0:
            raise InvalidPlan("collateral swap input must be positive (no collateral otherwise)")
        if s >= x:
            raise InvalidPlan("collateral swap must use only part of the flash loan")
        if len({self.flash_asset, self.deposit_asset, self.borrow_asset}) != 3:
            raise InvalidPlan("flash, deposit and borrow assets must be distinct")
        if self.borrow_amount != MAX and Fraction(self.borrow_amount) < 0:
            raise InvalidPlan("borrow amount must be non-negative")

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "flash_amount": self.flash_amount,
                "collateral_swap_in": self.collateral_swap_in,
                "flash_asset": self.flash_asset,
                "deposit_asset": self.deposit_asset,
                "borrow_asset": self.borrow_asset,
                "borrow_amount": self.borrow_amount,
                "attacker": self.attacker,
                "venue": self.venue,
            }
        )


def build_attack(plan: AttackPlan, block: int = 0, fee_rate=0) -> Transaction:
    plan.validate()
    a, b, c = plan.flash_asset, plan.deposit_asset, plan.borrow_asset
    x = Fraction(plan.flash_amount)
    s = Fraction(plan.collateral_swap_in)
    due = x * (1 + Fraction(fee_rate))
    steps = (
        FlashBorrow(a, x),
        Swap(a, b, s),
        Deposit(b, StepOutput(SWAP_COLLATERAL)),
        Swap(a, b, x - s),
        Borrow(c, plan.borrow_amount),
        Swap(b, a, StepOutput(SWAP_DISTORT)),
        CoverShortfall(a, c, due, plan.venue),
        FlashRepay(a, due),
    )
    return Transaction(steps, block, plan.attacker)


def predicted_profit_usd(o_b, y, theta, epsilon) -> Fraction:
    """``o_b * y * (theta / epsilon - 1)``; negative when theta < epsilon."""
    o_b, y, theta, epsilon = map(Fraction, (o_b, y, theta, epsilon))
    if o_b <= 0 or theta <= 0 or epsilon <= 0 or y < 0:
        raise ValueError("oracle price, theta and epsilon must be positive and Y non-negative")
    return o_b * y * (theta / epsilon - 1)


def max_profit_usd(o_b, max_y, max_theta, epsilon) -> Fraction:
    return predicted_profit_usd(o_b, max_y, max_theta, epsilon)


@dataclass
class AttackReport:
    outcome: Status
    failed_step: int | None
    reason: str | None
    theta: Fraction | None
    max_l_usd: Fraction | None
    borrowed: Fraction | None
    borrow_asset: str
    deposit_y: Fraction | None
    oracle_pre_usd: Fraction
    price_used_usd: Fraction | None
    predicted_g_usd: Fraction | None
    realized_profit_usd: Fraction
    note: str = DISCREPANCY_NOTE

    def to_dict(self) -> dict:
        return to_jsonable(self)

    @classmethod
    def from_dict(cls, d: dict) -> AttackReport:
        return cls(
            outcome=Status(d["outcome"]),
            failed_step=d["failed_step"],
            reason=d["reason"],
            theta=opt_fraction(d["theta"]),
            max_l_usd=opt_fraction(d["max_l_usd"]),
            borrowed=opt_fraction(d["borrowed"]),
            borrow_asset=d["borrow_asset"],
            deposit_y=opt_fraction(d["deposit_y"]),
            oracle_pre_usd=Fraction(d["oracle_pre_usd"]),
            price_used_usd=opt_fraction(d["price_used_usd"]),
            predicted_g_usd=opt_fraction(d["predicted_g_usd"]),
            realized_profit_usd=Fraction(d["realized_profit_usd"]),
            note=d.get("note", DISCREPANCY_NOTE),
        )


def holdings_value_usd(state: WorldState, account: str, prices: dict[str, Fraction]) -> Fraction:
    return sum((amt * prices[a] for a, amt in state.holdings(account).items()), Fraction(0))


def run_attack(state: WorldState, plan: AttackPlan) -> tuple[WorldState, AttackReport, TxOutcome]:
    """Execute the attack in the current block and report on it.

    A revert is a normal outcome, not an error.
    """
    plan.validate()
    pre_prices = dict(state.assets)
    oracle_pre = state.oracle_price(plan.deposit_asset)
    spot_pre = spot_price(state.pool(*plan.pool), plan.deposit_asset, plan.flash_asset)

    tx = build_attack(plan, state.block, state.flash.fee_rate)
    new_state, outcome = execute_transaction(state, tx)
    trace = outcome.trace

    theta = None
    if len(trace) > SWAP_DISTORT:
        # price of B in A right before the borrow step, relative to before the attack
        spot_distorted = trace[SWAP_DISTORT].outputs["spot_after"]
        theta = spot_distorted / spot_pre
    y = trace[DEPOSIT].outputs["amount"] if len(trace) > DEPOSIT else None

    max_l = borrowed = price_used = None
    if len(trace) > BORROW:
        rec = trace[BORROW]
        max_l = rec.outputs.get("limit_usd")
        borrowed = rec.outputs.get("amount")
        for q in rec.prices:
            if q["asset"] == plan.deposit_asset:
                price_used = q["price"]

    predicted = None
    if theta is not None and y is not None:
        predicted = predicted_profit_usd(oracle_pre, y, theta, state.plf.params.epsilon)

    realized = holdings_value_usd(new_state, plan.attacker, pre_prices) - holdings_value_usd(
        state, plan.attacker, pre_prices
    )
    report = AttackReport(
        outcome=outcome.status,
        failed_step=outcome.failed_step,
        reason=outcome.reason,
        theta=theta,
        max_l_usd=max_l,
        borrowed=borrowed if isinstance(borrowed, Fraction) else None,
        borrow_asset=plan.borrow_asset,
        deposit_y=y,
        oracle_pre_usd=oracle_pre,
        price_used_usd=price_used,
        predicted_g_usd=predicted,
        realized_profit_usd=realized,
    )
    return new_state, report, outcome


_SYMBOLS = {
    "flash_borrow": "F",
    "swap": "S",
    "deposit": "D",
    "borrow": "B",
    "cover_shortfall": "S",
    "flash_repay": "P",
    "transfer": "T",
    "liquidate": "L",
}


def _num(v) -> str:
    if isinstance(v, Fraction):
        return f"{int(v):,}" if v.denominator == 1 else f"{float(v):,.4f}"
    return str(v)


def format_trace(outcome: TxOutcome) -> str:
    """Human-readable timeline of a transaction, one line per step."""
    lines = []
    for i, rec in enumerate(outcome.trace):
        sym = _SYMBOLS.get(rec.op, "?")
        ins = ", ".join(f"{k}={_num(v)}" for k, v in rec.inputs.items())
        outs = ", ".join(f"{k}={_num(v)}" for k, v in rec.outputs.items() if k != "reserves")
        lines.append(f"tau_{i + 1} {sym}: {rec.op}({ins}) -> {outs}")
        for q in rec.prices:
            extra = ""
            if "p_before" in q:
                extra = f" stored p {_num(q['p_before'])} -> {_num(q['p_after'])}, delta {_num(q['discrepancy'])}"
            lines.append(f"    price[{q['asset']}] block {q['block']}: oracle ${_num(q['oracle'])} -> used ${_num(q['price'])}{extra}")
    if outcome.ok:
        lines.append("committed")
    else:
        lines.append(f"REVERTED at step {outcome.failed_step + 1}: {outcome.error}: {outcome.reason}")
    return "\n".join(lines)
