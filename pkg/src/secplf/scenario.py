"""Scenario files: JSON description of a world, a PLF, and an attack.

Example (abridged)::

    {
      "assets": {"A": "100", "B": "10", "C": "1"},
      "balances": {"flash": {"A": "1000000"}, "plf": {"C": "50000000"}},
      "pools": [{"assets": ["A", "B"], "reserves": ["100", "1000"]}],
      "plf": {"epsilon": "5", "price_mode": "raw",
              "feeds": {"B": {"pool": ["A", "B"], "numeraire": "A"}, "C": {"fixed": "1"}}},
      "flash_loan": {"fee_rate": "0"},
      "attack": {"flash_amount": "10000", "collateral_swap_in": "100"}
    }

Numbers are exact: JSON integers or decimal/rational strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .adversary import AttackPlan
from .amm import Pool, pair_id
from .errors import ConfigError, InvalidPlan
from .guard import init_state
from .jsonutil import parse_fraction
from .ledger import Transaction
from .plf import MAX
from .state import FixedFeed, FlashProvider, PlfParams, PlfState, PoolFeed, PriceMode, WorldState
from .steps import ALL, STEP_TYPES, StepOutput


@dataclass
class ScenarioConfig:
    name: str
    state: WorldState
    attack: AttackPlan | None = None
    transactions: list[tuple[str, tuple]] = field(default_factory=list)
    seed: int = 0
    raw: dict = field(default_factory=dict)

    def state_for(self, price_mode: PriceMode | None = None) -> WorldState:
        state = self.state.copy()
        if price_mode is not None:
            state.plf.params = PlfParams(state.plf.params.epsilon, price_mode, state.plf.params.guard_epsilon)
        return state


def _req(d: dict, key: str, path: str):
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object")
    if key not in d:
        raise ConfigError(f"{path}.{key}", "missing required field")
    return d[key]


def _asset(assets: dict, name, path: str) -> str:
    if name not in assets:
        raise ConfigError(path, f"unknown asset {name!r}")
    return name


def _amount_spec(value, path: str, allow_max: bool = False):
    if value == ALL:
        return ALL
    if allow_max and value == MAX:
        return MAX
    if isinstance(value, dict) and "output_of" in value:
        idx = value["output_of"]
        if not isinstance(idx, int) or idx < 0:
            raise ConfigError(f"{path}.output_of", "expected a non-negative step index")
        return StepOutput(idx)
    return parse_fraction(value, path)


def parse_step(d: dict, assets: dict, path: str):
    op = _req(d, "op", path)
    cls = STEP_TYPES.get(op)
    if cls is None:
        raise ConfigError(f"{path}.op", f"unknown step {op!r}; expected one of {sorted(STEP_TYPES)}")
    kwargs = {}
    for key, value in d.items():
        if key == "op":
            continue
        sub = f"{path}.{key}"
        if key in ("asset", "asset_in", "asset_out", "buy_asset", "pay_asset"):
            kwargs[key] = _asset(assets, value, sub)
        elif key in ("amount", "target"):
            kwargs[key] = None if value is None else _amount_spec(value, sub, allow_max=op == "borrow")
        elif key in ("to", "venue", "owner"):
            kwargs[key] = str(value)
        else:
            raise ConfigError(sub, f"unexpected field for step {op!r}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(path, f"bad fields for step {op!r}: {exc}") from None


def parse_scenario(raw: dict, name: str = "scenario") -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("$", "scenario must be a JSON object")

    assets_raw = _req(raw, "assets", "$")
    if not isinstance(assets_raw, dict) or not assets_raw:
        raise ConfigError("$.assets", "expected a non-empty object of asset -> USD price")
    assets = {}
    for sym, price in assets_raw.items():
        if not sym:
            raise ConfigError("$.assets", "asset symbols must be non-empty")
        p = parse_fraction(price, f"$.assets.{sym}")
        if p <= 0:
            raise ConfigError(f"$.assets.{sym}", "reference price must be positive")
        assets[sym] = p

    state = WorldState(assets=assets)

    for acct, holdings in (raw.get("balances") or {}).items():
        if not isinstance(holdings, dict):
            raise ConfigError(f"$.balances.{acct}", "expected asset -> amount")
        for sym, amt in holdings.items():
            _asset(assets, sym, f"$.balances.{acct}.{sym}")
            v = parse_fraction(amt, f"$.balances.{acct}.{sym}")
            if v < 0:
                raise ConfigError(f"$.balances.{acct}.{sym}", "balances must be non-negative")
            state.credit(acct, sym, v)

    for i, p in enumerate(raw.get("pools") or []):
        path = f"$.pools[{i}]"
        pa = _req(p, "assets", path)
        pr = _req(p, "reserves", path)
        if not (isinstance(pa, list) and len(pa) == 2 and isinstance(pr, list) and len(pr) == 2):
            raise ConfigError(path, "assets and reserves must be two-element lists")
        a = _asset(assets, pa[0], f"{path}.assets[0]")
        b = _asset(assets, pa[1], f"{path}.assets[1]")
        ra = parse_fraction(pr[0], f"{path}.reserves[0]")
        rb = parse_fraction(pr[1], f"{path}.reserves[1]")
        fee = parse_fraction(p.get("fee_multiplier", 1), f"{path}.fee_multiplier")
        try:
            pool = Pool.create(a, b, ra, rb, fee)
        except ValueError as exc:
            raise ConfigError(path, str(exc)) from None
        if pool.pair in state.pools:
            raise ConfigError(path, f"duplicate pool {a}/{b}")
        state.pools[pool.pair] = pool

    plf_raw = _req(raw, "plf", "$")
    eps = parse_fraction(_req(plf_raw, "epsilon", "$.plf"), "$.plf.epsilon")
    if eps <= 1:
        raise ConfigError("$.plf.epsilon", "safe collateralization ratio must exceed 1")
    try:
        mode = PriceMode(plf_raw.get("price_mode", "raw"))
    except ValueError:
        raise ConfigError("$.plf.price_mode", "expected 'raw' or 'guarded'") from None
    guard_eps = plf_raw.get("guard_epsilon")
    if guard_eps is not None:
        guard_eps = parse_fraction(guard_eps, "$.plf.guard_epsilon")
        if guard_eps <= 1:
            raise ConfigError("$.plf.guard_epsilon", "must exceed 1")
    feeds = {}
    for sym, f in (plf_raw.get("feeds") or {}).items():
        path = f"$.plf.feeds.{sym}"
        _asset(assets, sym, path)
        if isinstance(f, dict) and "fixed" in f:
            v = parse_fraction(f["fixed"], f"{path}.fixed")
            if v <= 0:
                raise ConfigError(f"{path}.fixed", "price must be positive")
            feeds[sym] = FixedFeed(v)
        elif isinstance(f, dict) and "pool" in f:
            pa = f["pool"]
            if not (isinstance(pa, list) and len(pa) == 2):
                raise ConfigError(f"{path}.pool", "expected two assets")
            key = pair_id(_asset(assets, pa[0], f"{path}.pool[0]"), _asset(assets, pa[1], f"{path}.pool[1]"))
            if key not in state.pools:
                raise ConfigError(f"{path}.pool", f"no pool {pa[0]}/{pa[1]} declared")
            if sym not in key:
                raise ConfigError(f"{path}.pool", f"pool does not trade {sym}")
            numeraire = _asset(assets, f.get("numeraire", key[0] if key[1] == sym else key[1]), f"{path}.numeraire")
            if numeraire not in key or numeraire == sym:
                raise ConfigError(f"{path}.numeraire", "numeraire must be the pool's other asset")
            num_usd = parse_fraction(f.get("numeraire_usd", assets[numeraire]), f"{path}.numeraire_usd")
            feeds[sym] = PoolFeed(key, numeraire, num_usd)
        else:
            raise ConfigError(path, "feed must be {'fixed': price} or {'pool': [a, b], 'numeraire': a}")
    state.plf = PlfState(PlfParams(eps, mode, guard_eps), account=str(plf_raw.get("account", "plf")), feeds=feeds)

    fl = raw.get("flash_loan") or {}
    fee = parse_fraction(fl.get("fee_rate", 0), "$.flash_loan.fee_rate")
    if fee < 0:
        raise ConfigError("$.flash_loan.fee_rate", "fee rate must be non-negative")
    state.flash = FlashProvider(account=str(fl.get("account", "flash")), fee_rate=fee)

    # guard bootstrap: first honest oracle reading at deployment
    for sym in feeds:
        state.guards[sym] = init_state(state.oracle_price(sym), state.block)

    attack = None
    if raw.get("attack") is not None:
        attack = parse_attack(raw["attack"], state)

    txs = []
    for i, t in enumerate(raw.get("transactions") or []):
        path = f"$.transactions[{i}]"
        sender = str(_req(t, "sender", path))
        steps = tuple(parse_step(s, assets, f"{path}.steps[{j}]") for j, s in enumerate(_req(t, "steps", path)))
        txs.append((sender, steps))

    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("$.seed", "expected an integer")
    return ScenarioConfig(str(raw.get("name", name)), state, attack, txs, seed, raw)


def parse_attack(a: dict, state: WorldState) -> AttackPlan:
    path = "$.attack"
    assets = state.assets
    plan = AttackPlan(
        flash_amount=parse_fraction(_req(a, "flash_amount", path), f"{path}.flash_amount"),
        collateral_swap_in=parse_fraction(_req(a, "collateral_swap_in", path), f"{path}.collateral_swap_in"),
        flash_asset=_asset(assets, a.get("flash_asset", "A"), f"{path}.flash_asset"),
        deposit_asset=_asset(assets, a.get("deposit_asset", "B"), f"{path}.deposit_asset"),
        borrow_asset=_asset(assets, a.get("borrow_asset", "C"), f"{path}.borrow_asset"),
        borrow_amount=_amount_spec(a.get("borrow_amount", MAX), f"{path}.borrow_amount", allow_max=True),
        attacker=str(a.get("attacker", "attacker")),
        venue=str(a.get("venue", "otc")),
    )
    try:
        plan.validate()
    except InvalidPlan as exc:
        raise ConfigError(path, str(exc)) from None
    if plan.pool not in state.pools:
        raise ConfigError(path, f"no pool {plan.flash_asset}/{plan.deposit_asset} to manipulate")
    if plan.deposit_asset not in state.plf.feeds or plan.borrow_asset not in state.plf.feeds:
        raise ConfigError(path, "PLF needs price feeds for the deposit and borrow assets")
    return plan


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(str(path), "scenario file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from None
    return parse_scenario(raw, path.stem)


def bundled(name: str = "fig1") -> ScenarioConfig:
    text = resources.files("secplf").joinpath("scenarios", f"{name}.json").read_text(encoding="utf-8")
    return parse_scenario(json.loads(text), name)


def transactions_for(cfg: ScenarioConfig, start_block: int) -> list[Transaction]:
    return [Transaction(steps, start_block + i, sender) for i, (sender, steps) in enumerate(cfg.transactions)]
