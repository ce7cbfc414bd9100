"""Block/transaction state machine with all-or-nothing execution."""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field, replace

from .errors import BlockMismatch, OpenLoanAtCommit, StepFailure
from .flash_loan import assert_no_open_loans
from .state import WorldState
from .steps import StepRecord, TxContext


class Status(str, enum.Enum):
    SUCCESS = "success"
    REVERTED = "reverted"


@dataclass(frozen=True)
class Transaction:
    steps: tuple
    block: int
    sender: str

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))


@dataclass
class TxOutcome:
    status: Status
    trace: list[StepRecord] = field(default_factory=list)
    failed_step: int | None = None
    reason: str | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.status is Status.SUCCESS


@dataclass(frozen=True)
class Snapshot:
    state: WorldState


def begin_block(state: WorldState) -> WorldState:
    return replace(state.copy(), block=state.block + 1)


def snapshot(state: WorldState) -> Snapshot:
    return Snapshot(copy.deepcopy(state))


def restore(snap: Snapshot) -> WorldState:
    return copy.deepcopy(snap.state)


def execute_transaction(state: WorldState, tx: Transaction) -> tuple[WorldState, TxOutcome]:
    """Run ``tx`` against ``state``.

    On success returns the committed state. If any step raises a
    :class:`~secplf.errors.StepFailure`, or a flash loan is still open at the
    end, the untouched input state is returned with a ``REVERTED`` outcome
    naming the failing step (``len(tx.steps)`` for the commit-time check).
    """
    if tx.block != state.block:
        raise BlockMismatch(f"transaction for block {tx.block} submitted at block {state.block}")

    ctx = TxContext(tx.sender)
    work = state
    for i, step in enumerate(tx.steps):
        try:
            work, rec = step.apply(work, ctx)
        except StepFailure as exc:
            trace = list(ctx.records)
            if ctx.pending is not None:
                ctx.pending.outputs = {"error": type(exc).__name__}
                trace.append(ctx.pending)
            return state, TxOutcome(Status.REVERTED, trace, i, str(exc), type(exc).__name__)
        ctx.records.append(rec)

    try:
        assert_no_open_loans(work)
    except OpenLoanAtCommit as exc:
        return state, TxOutcome(Status.REVERTED, list(ctx.records), len(tx.steps), str(exc), type(exc).__name__)
    return work, TxOutcome(Status.SUCCESS, list(ctx.records))


def run_block(state: WorldState, tx_steps, sender: str) -> tuple[WorldState, TxOutcome]:
    """Open a new block and execute one transaction made of ``tx_steps`` in it."""
    state = begin_block(state)
    return execute_transaction(state, Transaction(tuple(tx_steps), state.block, sender))
