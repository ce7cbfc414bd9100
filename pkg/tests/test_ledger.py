from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secplf.errors import BlockMismatch
from secplf.ledger import Status, Transaction, begin_block, execute_transaction, restore, run_block, snapshot
from secplf.scenario import bundled
from secplf.state import WorldState
from secplf.steps import FlashBorrow, FlashRepay, Swap, Transfer


@pytest.fixture
def world(fig1):
    s = fig1.state_for()
    s.credit("alice", "A", 50)
    return s


def test_begin_block():
    s = WorldState(assets={"A": Fraction(1)}, block=7)
    assert begin_block(s).block == 8
    fresh = WorldState(assets={"A": Fraction(1)})
    one = begin_block(fresh)
    assert one.block == 1 and begin_block(one).block == 2
    assert fresh.block == 0


def test_transfer_commits(world):
    new, out = execute_transaction(world, Transaction([Transfer("A", 10, "bob")], 0, "alice"))
    assert out.status is Status.SUCCESS
    assert new.balance("alice", "A") == 40 and new.balance("bob", "A") == 10
    assert world.balance("alice", "A") == 50


def test_overdraft_reverts(world):
    pre = world.copy()
    new, out = execute_transaction(world, Transaction([Transfer("A", 10, "bob"), Transfer("A", 41, "bob")], 0, "alice"))
    assert out.status is Status.REVERTED and out.failed_step == 1
    assert out.error == "InsufficientBalance"
    assert new == pre == world


def test_block_mismatch(world):
    with pytest.raises(BlockMismatch):
        execute_transaction(world, Transaction([Transfer("A", 1, "bob")], 3, "alice"))


def test_unclosed_flash_loan_reverts_at_commit(world):
    new, out = execute_transaction(world, Transaction([FlashBorrow("A", 100)], 0, "alice"))
    assert out.status is Status.REVERTED
    assert out.failed_step == 1 and out.error == "OpenLoanAtCommit"
    assert new == world


def test_snapshot_restore(world):
    snap = snapshot(world)
    assert restore(snap) == world
    world.credit("bob", "A", 5)
    assert restore(snap) != world
    inner = snapshot(world)
    world.credit("bob", "A", 5)
    assert restore(inner).balance("bob", "A") == 5
    assert restore(snap).balance("bob", "A") == 0


def test_determinism(world):
    tx = Transaction([FlashBorrow("A", 100), Swap("A", "B", 100), Swap("B", "A", "all"), FlashRepay("A")], 0, "alice")
    a = execute_transaction(world, tx)
    b = execute_transaction(world, tx)
    assert a[0] == b[0]
    assert [r.to_dict() for r in a[1].trace] == [r.to_dict() for r in b[1].trace]
    assert a[1].ok


def test_run_block(world):
    s, out = run_block(world, [Transfer("A", 1, "bob")], "alice")
    assert out.ok and s.block == world.block + 1


@given(st.lists(st.tuples(st.sampled_from(["A", "B"]), st.integers(1, 400)), min_size=1, max_size=8))
def test_conservation_over_swaps(swaps):
    state = bundled("fig1").state_for()
    state.credit("trader", "A", 1000)
    state.credit("trader", "B", 1000)
    steps = [Swap(a, "B" if a == "A" else "A", amt) for a, amt in swaps]
    new, out = execute_transaction(state, Transaction(steps, 0, "trader"))
    for asset in state.assets:
        assert new.total_supply(asset) == state.total_supply(asset)
    if not out.ok:
        assert new == state
