"""Flash-loan oracle-manipulation simulator, SecPLF price guard, and
price-discrepancy risk analyzer."""

from .adversary import AttackPlan, AttackReport, build_attack, max_profit_usd, predicted_profit_usd, run_attack
from .amm import Pool, oracle_usd, pair_id, spot_price, swap_exact_in
from .guard import GuardOutput, PriceState, guarded_price, init_state
from .ledger import Status, Transaction, TxOutcome, begin_block, execute_transaction, restore, snapshot
from .state import PriceMode, WorldState

__version__ = "0.1.0"

__all__ = [
    "AttackPlan",
    "AttackReport",
    "GuardOutput",
    "Pool",
    "PriceMode",
    "PriceState",
    "Status",
    "Transaction",
    "TxOutcome",
    "WorldState",
    "begin_block",
    "build_attack",
    "execute_transaction",
    "guarded_price",
    "init_state",
    "max_profit_usd",
    "oracle_usd",
    "pair_id",
    "predicted_profit_usd",
    "restore",
    "run_attack",
    "snapshot",
    "spot_price",
    "swap_exact_in",
]
