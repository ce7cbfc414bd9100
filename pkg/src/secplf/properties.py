"""Randomized invariant suites for the guard and the guarded PLF.

* ``once_per_block``: any number of guard queries inside one block move the
  stored state at most once.
* ``bounded_growth``: inside one block the guard never outputs more than
  ``p_pre * epsilon``, and the bound is actually reached.
* ``attack_unprofitable``: random flash-loan manipulation attacks against a
  guarded PLF never commit with positive profit.
* ``distortion_at_cap``: a hand-built attack with distortion exactly epsilon has
  zero predicted profit and hits the guard cap exactly.

Every failure carries a JSON-ready counterexample. ``disable_guard_cap``
runs the guard with a huge cap while still checking against the nominal
epsilon; the suites must then fail.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .adversary import predicted_profit_usd, run_attack
from .guard import guarded_price, init_state
from .jsonutil import to_jsonable
from .ledger import Status, begin_block
from .scenario import parse_scenario
from .state import PriceMode

EPSILONS = (Fraction(5, 4), Fraction(2), Fraction(5))
DISABLED_CAP = Fraction(10**9)


@dataclass
class SuiteResult:
    name: str
    trials: int
    failures: list[dict] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return to_jsonable(
            {"name": self.name, "trials": self.trials, "passed": self.passed, "failures": self.failures, "stats": self.stats}
        )


def _price(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 10**6), rng.randint(1, 10**3))


def once_per_block(rng: random.Random, trials: int, disable_guard_cap: bool = False) -> SuiteResult:
    res = SuiteResult("once_per_block", trials)
    most = 0
    for t in range(trials):
        eps = rng.choice(EPSILONS)
        cap = DISABLED_CAP if disable_guard_cap else eps
        start = init_state(_price(rng), rng.randint(0, 100))
        block = start.id + rng.randint(0, 3)
        oracles = [_price(rng) for _ in range(rng.randint(2, 10))]
        state, transitions = start, 0
        for o in oracles:
            new, _ = guarded_price(state, o, block, cap)
            transitions += new != state
            state = new
        most = max(most, transitions)
        if transitions > 1:
            res.failures.append(
                {"trial": t, "epsilon": eps, "state": start, "block": block, "oracles": oracles, "transitions": transitions}
            )
    res.stats["max_transitions"] = most
    return res


def bounded_growth(rng: random.Random, trials: int, disable_guard_cap: bool = False) -> SuiteResult:
    res = SuiteResult("bounded_growth", trials)
    hits = 0
    for t in range(trials):
        eps = rng.choice(EPSILONS)
        cap = DISABLED_CAP if disable_guard_cap else eps
        p_pre = _price(rng)
        state = init_state(p_pre, rng.randint(0, 100))
        block = state.id + 1
        # oracle moves range from a crash to a 3*eps pump
        oracles = [p_pre * Fraction(rng.randint(1, 300), 100) * eps for _ in range(rng.randint(1, 10))]
        bound = p_pre * eps
        worst = Fraction(0)
        for o in oracles:
            state, out = guarded_price(state, o, block, cap)
            worst = max(worst, out.price)
        hits += worst == bound
        if worst > bound:
            res.failures.append({"trial": t, "epsilon": eps, "p_pre": p_pre, "oracles": oracles, "max_output": worst})
    res.stats["boundary_hits"] = hits
    if hits == 0 and not res.failures:
        res.failures.append({"reason": "no trial reached the p_pre * epsilon bound"})
    return res


def random_attack_scenario(rng: random.Random, guard_epsilon=None) -> dict:
    """A scenario dict with an A/B pool, a guarded PLF lending C, and an attack plan."""
    a = Fraction(rng.randint(10, 10**5))
    b = a * Fraction(rng.randint(1, 1000), rng.randint(1, 100))
    p_a = Fraction(rng.randint(1, 5000))
    p_b = p_a * a / b
    x = a * Fraction(rng.randint(1, 20000), 100)
    s = x * Fraction(rng.randint(1, 99), 100)
    eps = rng.choice(EPSILONS)
    capital = Fraction(rng.randint(0, 200), 100) * x * p_a
    plf = {
        "epsilon": str(eps),
        "price_mode": "guarded",
        "feeds": {"A": {"fixed": str(p_a)}, "B": {"pool": ["A", "B"], "numeraire": "A"}, "C": {"fixed": "1"}},
    }
    if guard_epsilon is not None:
        plf["guard_epsilon"] = str(guard_epsilon)
    attack = {"flash_amount": str(x), "collateral_swap_in": str(s)}
    if rng.random() < 0.2:
        # a fixed borrow sized as if the manipulated price went through unguarded
        attack["borrow_amount"] = str(Fraction(rng.randint(1, 100), 100) * x * p_a)
    return {
        "name": "random_attack",
        "assets": {"A": str(p_a), "B": str(p_b), "C": "1"},
        "balances": {
            "flash": {"A": str(2 * x)},
            "plf": {"C": str(10**18)},
            "otc": {"A": str(10 * x)},
            **({"attacker": {"C": str(capital)}} if capital else {}),
        },
        "pools": [
            {"assets": ["A", "B"], "reserves": [str(a), str(b)], "fee_multiplier": str(1 - Fraction(rng.randint(0, 3), 1000))}
        ],
        "plf": plf,
        "flash_loan": {"fee_rate": str(Fraction(rng.randint(0, 10), 10000))},
        "attack": attack,
    }


def attack_unprofitable(rng: random.Random, trials: int, disable_guard_cap: bool = False) -> SuiteResult:
    res = SuiteResult("attack_unprofitable", trials)
    committed = reverted = raw_profitable = 0
    for t in range(trials):
        raw = random_attack_scenario(rng, DISABLED_CAP if disable_guard_cap else None)
        cfg = parse_scenario(raw)
        state = begin_block(cfg.state_for(PriceMode.GUARDED))
        _, report, _ = run_attack(state, cfg.attack)
        if report.outcome is Status.SUCCESS:
            committed += 1
        else:
            reverted += 1
        if report.predicted_g_usd is not None and report.predicted_g_usd > 0:
            raw_profitable += 1
        if report.realized_profit_usd > 0:
            res.failures.append({"trial": t, "scenario": raw, "report": report.to_dict()})
    res.stats.update(committed=committed, reverted=reverted, distortion_above_epsilon=raw_profitable)
    return res


def distortion_at_cap_scenario(epsilon=4) -> dict:
    """Distortion exactly epsilon: with no fees, theta = ((a + X) / a)**2."""
    eps = Fraction(epsilon)
    root = Fraction(int(eps**0.5 * 10**6), 10**6)
    if root * root != eps:
        raise ValueError("epsilon must be the square of a terminating decimal")
    a, b = Fraction(100), Fraction(1000)
    x = a * (root - 1)
    return {
        "name": "distortion_at_cap",
        "assets": {"A": "100", "B": "10", "C": "1"},
        "balances": {"flash": {"A": str(10 * x)}, "plf": {"C": "50000000"}, "otc": {"A": str(10 * x)}},
        "pools": [{"assets": ["A", "B"], "reserves": [str(a), str(b)]}],
        "plf": {
            "epsilon": str(eps),
            "price_mode": "guarded",
            "feeds": {"A": {"fixed": "100"}, "B": {"pool": ["A", "B"], "numeraire": "A"}, "C": {"fixed": "1"}},
        },
        "flash_loan": {"fee_rate": "0"},
        "attack": {"flash_amount": str(x), "collateral_swap_in": str(x / 10)},
    }


def distortion_at_cap(disable_guard_cap: bool = False) -> SuiteResult:
    res = SuiteResult("distortion_at_cap", 2)
    for eps in (Fraction(4), Fraction(9, 4)):
        raw = distortion_at_cap_scenario(eps)
        if disable_guard_cap:
            raw["plf"]["guard_epsilon"] = str(DISABLED_CAP)
        cfg = parse_scenario(raw)
        state = begin_block(cfg.state_for(PriceMode.GUARDED))
        p_pre = state.guards["B"].p
        _, report, _ = run_attack(state, cfg.attack)
        problems = []
        if report.theta != eps:
            problems.append(f"theta {report.theta} != epsilon {eps}")
        if report.predicted_g_usd != 0:
            problems.append(f"predicted profit {report.predicted_g_usd} != 0")
        if report.price_used_usd != p_pre * eps:
            problems.append(f"guard output {report.price_used_usd} != p_pre * epsilon {p_pre * eps}")
        if report.realized_profit_usd > 0:
            problems.append(f"realized profit {report.realized_profit_usd} > 0")
        if predicted_profit_usd(report.oracle_pre_usd, report.deposit_y, report.theta, eps) != 0:
            problems.append("closed form is not zero at theta = epsilon")
        if problems:
            res.failures.append({"epsilon": eps, "scenario": raw, "problems": problems, "report": report.to_dict()})
    return res


def run_suites(seed: int = 0, trials: int = 1000, disable_guard_cap: bool = False) -> list[SuiteResult]:
    """All suites, each with its own RNG stream derived from ``seed``."""
    return [
        once_per_block(random.Random(f"{seed}:once"), trials, disable_guard_cap),
        bounded_growth(random.Random(f"{seed}:growth"), trials, disable_guard_cap),
        attack_unprofitable(random.Random(f"{seed}:attack"), max(trials // 2, 1), disable_guard_cap),
        distortion_at_cap(disable_guard_cap),
    ]
