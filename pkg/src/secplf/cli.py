"""``secplf`` command line.

Exit codes: 0 ran to completion (reverted transactions included),
2 configuration or input error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, kernels, risk
from .adversary import format_trace, run_attack
from .errors import AnalyzerError, ConfigError
from .jsonutil import to_jsonable
from .ledger import Status, begin_block, execute_transaction
from .properties import run_suites
from .scenario import ScenarioConfig, bundled, load_scenario, transactions_for
from .state import PriceMode

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3
MARKET_CAPS = "market_caps.csv"


def _load(name: str) -> ScenarioConfig:
    path = Path(name)
    if path.exists():
        return load_scenario(path)
    stem = name[:-5] if name.endswith(".json") else name
    if path.parent == Path(".") and stem.isidentifier():
        try:
            return bundled(stem)
        except FileNotFoundError:
            pass
    raise ConfigError(name, "scenario file not found (and no bundled scenario of that name)")


def _write_json(obj, path: str | None) -> None:
    text = json.dumps(to_jsonable(obj), indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_simulate_attack(args) -> int:
    cfg = _load(args.scenario)
    if cfg.attack is None:
        raise ConfigError("$.attack", "scenario has no attack plan")
    mode = {"guarded": PriceMode.GUARDED, "unguarded": PriceMode.RAW, None: None}[args.mode]
    state = begin_block(cfg.state_for(mode))
    new_state, report, outcome = run_attack(state, cfg.attack)

    if not args.quiet:
        print(f"scenario {cfg.name}: price mode {state.plf.params.price_mode.value}, block {state.block}")
        print(format_trace(outcome))
    if args.trace_out:
        _write_json(
            {
                "scenario": cfg.name,
                "block": state.block,
                "status": outcome.status,
                "failed_step": outcome.failed_step,
                "error": outcome.error,
                "reason": outcome.reason,
                "steps": [r.to_dict() for r in outcome.trace],
            },
            args.trace_out,
        )
    _write_json(report.to_dict(), args.report_out)

    if state.plf.params.price_mode is PriceMode.GUARDED:
        if report.realized_profit_usd > 0:
            print("invariant violated: guarded attack committed with profit", file=sys.stderr)
            return EXIT_INVARIANT
        if report.outcome is Status.REVERTED and new_state != state:
            print("invariant violated: reverted transaction changed state", file=sys.stderr)
            return EXIT_INVARIANT
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _load(args.scenario)
    if not cfg.transactions:
        raise ConfigError("$.transactions", "scenario lists no transactions")
    state = cfg.state_for(None)
    results = []
    for tx in transactions_for(cfg, state.block + 1):
        state = begin_block(state)
        state, outcome = execute_transaction(state, tx)
        print(f"block {tx.block} sender {tx.sender}: {outcome.status.value}")
        print(format_trace(outcome))
        results.append({"block": tx.block, "sender": tx.sender, "outcome": outcome})
    if args.out:
        _write_json(results, args.out)
    return EXIT_OK


def _data_files(data_dir: Path) -> list[Path]:
    if not data_dir.is_dir():
        raise ConfigError(str(data_dir), "data directory not found")
    files = sorted(p for p in data_dir.glob("*.csv") if p.name != MARKET_CAPS)
    if not files:
        raise ConfigError(str(data_dir), "no per-asset CSV files")
    return files


def cmd_analyze(args) -> int:
    data_dir = args.data_dir or os.environ.get("SECPLF_DATA_DIR")
    if not data_dir:
        raise ConfigError("DATA_DIR", "give a data directory or set SECPLF_DATA_DIR")
    data_dir = Path(data_dir)
    files = _data_files(data_dir)
    params = risk.RiskParams(args.epsilon, args.z, args.t)
    try:
        params.validate()
    except ValueError as exc:
        raise ConfigError("--epsilon/--z/--t", str(exc)) from None
    if args.buckets < 2:
        raise ConfigError("--buckets", "need at least 2 buckets")

    caps_path = Path(args.market_caps) if args.market_caps else data_dir / MARKET_CAPS
    caps = {}
    if caps_path.exists():
        try:
            caps = risk.read_market_caps(caps_path)
        except AnalyzerError as exc:
            raise ConfigError(f"{caps_path}", str(exc)) from None

    assets, fragments = [], []
    for f in files:
        try:
            series = risk.ingest_csv(f, f.stem)
            if args.subcommand == "cdf":
                fragments.append(risk.cdf_report(series, params.T, params.epsilon, args.buckets))
            assets.append(risk.analyze_series(series, params, 0, args.tz_rule, caps.get(series.asset)))
        except AnalyzerError as exc:
            raise ConfigError(str(f), str(exc)) from None
    report = risk.RiskReport(params.epsilon, params.z, params.T, args.tz_rule, assets)

    print(f"backend {kernels.BACKEND}; epsilon {params.epsilon}, z {params.z!r}, T {params.T}")
    if args.subcommand == "tz":
        print(f"{'asset':<12} {'minutes':>10} {'T_z':>8}")
        for a in assets:
            print(f"{a.asset:<12} {a.n:>10} {a.tz:>8}")
    elif args.subcommand == "exceedance":
        print(f"{'asset':<12} {'minutes':>10} {'exceed':>8} {'P(no discrepancy)':>20}")
        for a in assets:
            print(f"{a.asset:<12} {a.n:>10} {a.exceedance_count:>8} {a.exceedance_probability:>20.10f}")
    else:
        for frag in fragments:
            below = next((p for x, p in frag.points if x == 0.0), None)
            print(f"{frag.asset}: {frag.samples} samples, P(x <= 0) = {below!r}")

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for a, frag in zip(assets, fragments):
            a.cdf = frag.points
        (out / "risk_report.json").write_text(report.to_json() + "\n", encoding="utf-8")
        if args.subcommand in ("tz", "exceedance"):
            risk.write_tz_csv(report, out / f"{args.subcommand}.csv")
            risk.write_tz_plot(report, out / "fig2_tz_vs_market_cap.dat")
        else:
            risk.write_cdf_csv(fragments, out / "cdf.csv")
            risk.write_cdf_plot(fragments, out / "fig3_cdf.dat")
        print(f"wrote reports to {out}")
    return EXIT_OK


def cmd_property_suite(args) -> int:
    results = run_suites(args.seed, args.trials, args.disable_guard_cap)
    ok = True
    for r in results:
        stats = ", ".join(f"{k}={v}" for k, v in r.stats.items())
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.trials} trials{'; ' + stats if stats else ''}")
        if not r.passed:
            ok = False
            print(json.dumps(to_jsonable(r.failures[0]), indent=2))
    if args.out:
        _write_json([r.to_dict() for r in results], args.out)
    return EXIT_OK if ok else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="secplf", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate-attack", help="run a scenario's flash-loan attack")
    sim.add_argument("scenario", help="scenario JSON path or bundled name (fig1)")
    mode = sim.add_mutually_exclusive_group()
    mode.add_argument("--guarded", dest="mode", action="store_const", const="guarded")
    mode.add_argument("--unguarded", dest="mode", action="store_const", const="unguarded")
    sim.add_argument("--trace-out", help="write the step trace JSON here")
    sim.add_argument("--report-out", help="write the attack report JSON here (default stdout)")
    sim.add_argument("--quiet", action="store_true", help="skip the human-readable trace")
    sim.set_defaults(func=cmd_simulate_attack, mode=None)

    run = sub.add_parser("run", help="execute a scenario's transactions, one block each")
    run.add_argument("scenario")
    run.add_argument("--out")
    run.set_defaults(func=cmd_run)

    an = sub.add_parser("analyze", help="price-discrepancy risk statistics over minute CSVs")
    an.add_argument("subcommand", choices=("tz", "cdf", "exceedance"))
    an.add_argument("data_dir", nargs="?", help="directory of <asset>.csv files (default $SECPLF_DATA_DIR)")
    an.add_argument("--epsilon", type=float, default=1.25)
    an.add_argument("--z", type=float, default=1 - 1e-5)
    an.add_argument("--t", type=int, default=600, help="window length in minutes")
    an.add_argument("--buckets", type=int, default=101)
    an.add_argument("--tz-rule", choices=(risk.FIRST_CROSSING, risk.LARGEST), default=risk.FIRST_CROSSING)
    an.add_argument("--market-caps", help=f"asset,market_cap_usd CSV (default DATA_DIR/{MARKET_CAPS})")
    an.add_argument("--out", help="output directory for JSON/CSV/plot data")
    an.set_defaults(func=cmd_analyze)

    ps = sub.add_parser("property-suite", help="randomized guard and attack invariant suites")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--trials", type=int, default=1000)
    ps.add_argument("--out")
    ps.add_argument("--disable-guard-cap", action="store_true", help=argparse.SUPPRESS)
    ps.set_defaults(func=cmd_property_suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AnalyzerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
