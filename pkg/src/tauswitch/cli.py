"""Command-line entry point: synth, backtest, and sweep subcommands.

Configuration comes from a flat key=value text file ('#' starts a comment);
any flag of the same name overrides the file. Validation failures exit
non-zero with a single-line diagnostic naming the offending field.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import date as Date
from datetime import timedelta
from pathlib import Path

import numpy as np

from .agents import DEFAULT_INITIAL_BALANCE, AgentSpec, build_agent
from .backtest import (
    BacktestConfig,
    metrics_table_lines,
    run_backtest,
    tau_sweep,
    write_report,
    write_sweep_csv,
)
from .data import OHLCV_COLUMNS, OhlcvBar, load_panel

DEFAULT_MOMENTUM_LOOKBACK = 63

#: Documented ranges for the synthetic price generator (annualized).
SYNTH_DRIFT_RANGE = (-0.05, 0.10)
SYNTH_VOL_RANGE = (0.10, 0.40)
SYNTH_START_PRICE_RANGE = (20.0, 200.0)
SYNTH_NOISE_SCALE = 0.003

_CONFIG_KEYS = {
    "data": str,
    "agent_a": str,
    "agent_b": str,
    "out": str,
    "tickers": str,
    "date_start": str,
    "date_end": str,
    "tau": float,
    "tau_grid": str,
    "group": int,
    "iterations": int,
    "seed": int,
    "initial_balance": float,
    "cost_rate": float,
    "turbulence_threshold": float,
    "turbulence_window": int,
    "validation_window": int,
    "rebalance_window": int,
    "epsilon": float,
    "risk_free_rate": float,
}


def synth_panel(
    seed: int,
    n_tickers: int,
    n_days: int,
    out: str | Path,
    start_date: str = "2015-01-02",
) -> Path:
    """Write a geometric-Brownian-motion OHLCV CSV, deterministic per seed.

    Per-ticker annual drift, volatility, and starting price are drawn once
    from the documented ranges; volume is uniform noise. Weekdays only.
    """
    if n_tickers < 1:
        raise ValueError("tickers must be >= 1")
    if n_days < 2:
        raise ValueError("days must be >= 2")
    rng = np.random.default_rng(seed)
    dt = 1.0 / 252.0

    dates = []
    day = Date.fromisoformat(start_date)
    while len(dates) < n_days:
        if day.weekday() < 5:
            dates.append(day)
        day += timedelta(days=1)

    tickers = [f"S{i:02d}" for i in range(n_tickers)]
    drift = rng.uniform(*SYNTH_DRIFT_RANGE, size=n_tickers)
    vol = rng.uniform(*SYNTH_VOL_RANGE, size=n_tickers)
    start = rng.uniform(*SYNTH_START_PRICE_RANGE, size=n_tickers)

    shocks = rng.standard_normal((n_days - 1, n_tickers))
    log_steps = (drift - 0.5 * vol**2) * dt + vol * np.sqrt(dt) * shocks
    close = np.vstack([start, start * np.exp(np.cumsum(log_steps, axis=0))])
    close = np.round(close, 4)

    opens = np.vstack([close[0], close[:-1]])
    spread = np.abs(rng.standard_normal((n_days, n_tickers))) * SYNTH_NOISE_SCALE
    high = np.round(np.maximum(opens, close) * (1.0 + spread), 4)
    low = np.round(np.minimum(opens, close) * (1.0 - spread), 4)
    high = np.maximum(high, np.maximum(opens, close))
    low = np.minimum(low, np.minimum(opens, close))
    volume = rng.integers(100_000, 1_000_000, size=(n_days, n_tickers))

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(OHLCV_COLUMNS)]
    for t, date_t in enumerate(dates):
        for d, ticker in enumerate(tickers):
            bar = OhlcvBar(
                date=date_t,
                ticker=ticker,
                open=float(opens[t, d]),
                high=float(high[t, d]),
                low=float(low[t, d]),
                close=float(close[t, d]),
                volume=int(volume[t, d]),
            )
            lines.append(
                f"{bar.date.isoformat()},{bar.ticker},{bar.open:.4f},{bar.high:.4f},"
                f"{bar.low:.4f},{bar.close:.4f},{bar.volume}"
            )
    out.write_text("\n".join(lines) + "\n")
    return out


def parse_config_file(path: str | Path) -> dict:
    """Flat key=value lines; unknown keys are rejected."""
    values: dict = {}
    for lineno, raw_line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got '{line}'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown config key '{key}'")
        caster = _CONFIG_KEYS[key]
        if caster is not str and value.lower() in ("none", ""):
            values[key] = None
            continue
        try:
            values[key] = caster(value)
        except ValueError:
            raise ValueError(
                f"{path}:{lineno}: value for '{key}' must be {caster.__name__}"
            ) from None
    return values


def parse_agent_value(value: str) -> AgentSpec:
    """'buy_and_hold', 'momentum[:lookback]', or a replay CSV path."""
    if value == "buy_and_hold":
        return AgentSpec("buy_and_hold")
    if value == "momentum" or value.startswith("momentum:"):
        lookback = DEFAULT_MOMENTUM_LOOKBACK
        if ":" in value:
            lookback = int(value.split(":", 1)[1])
        return AgentSpec("momentum", lookback=lookback)
    return AgentSpec("replay", path=value)


def parse_tau_grid(text: str) -> list[float]:
    """Comma-separated thresholds; duplicates collapsed (first occurrence wins)."""
    try:
        raw = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValueError(f"tau grid must be comma-separated numbers, got '{text}'") from None
    if not raw:
        raise ValueError("tau grid is empty")
    grid: list[float] = []
    duplicates = False
    for value in raw:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"tau grid values must be in [0, 1], got {value}")
        if value in grid:
            duplicates = True
        else:
            grid.append(value)
    if duplicates:
        print("warning: duplicate tau values collapsed", file=sys.stderr)
    return grid


def _effective_settings(args: argparse.Namespace) -> dict:
    settings = parse_config_file(args.config) if args.config else {}
    for key in _CONFIG_KEYS:
        override = getattr(args, key, None)
        if override is not None:
            settings[key] = override
    return settings


def _require(settings: dict, key: str) -> str:
    if not settings.get(key):
        raise ValueError(f"missing required setting '{key}'")
    return settings[key]


def _build_run_inputs(settings: dict):
    config = BacktestConfig(
        tau=settings.get("tau", 0.5),
        classifier_group=settings.get("group", 3),
        initial_balance=settings.get("initial_balance", DEFAULT_INITIAL_BALANCE),
        cost_rate=settings.get("cost_rate", 0.001),
        turbulence_threshold=settings.get("turbulence_threshold"),
        turbulence_window=settings.get("turbulence_window", 252),
        validation_window=settings.get("validation_window", 60),
        rebalance_window=settings.get("rebalance_window", 63),
        iterations=settings.get("iterations", 30),
        seed=settings.get("seed", 0),
        epsilon=settings.get("epsilon", 1e-8),
        risk_free_rate=settings.get("risk_free_rate", 0.0),
        date_start=Date.fromisoformat(settings["date_start"]) if settings.get("date_start") else None,
        date_end=Date.fromisoformat(settings["date_end"]) if settings.get("date_end") else None,
    )
    tickers = None
    if settings.get("tickers"):
        tickers = [part.strip() for part in settings["tickers"].split(",") if part.strip()]
    panel = load_panel(
        _require(settings, "data"),
        tickers=tickers,
        date_range=(config.date_start, config.date_end),
    )
    agent_a = build_agent(
        parse_agent_value(_require(settings, "agent_a")),
        panel,
        config.initial_balance,
        agent_id=0,
    )
    agent_b = build_agent(
        parse_agent_value(_require(settings, "agent_b")),
        panel,
        config.initial_balance,
        agent_id=1,
    )
    return config, panel, agent_a, agent_b


#: Settings that exist only at the CLI layer (everything else lands in
#: BacktestConfig and is echoed from there, post-override).
_CLI_ONLY_KEYS = ("data", "agent_a", "agent_b", "out", "tickers")


def _cli_extras(settings: dict) -> dict:
    return {key: settings[key] for key in _CLI_ONLY_KEYS if key in settings}


def _cmd_synth(args: argparse.Namespace) -> int:
    path = synth_panel(args.seed, args.tickers, args.days, args.out, args.start_date)
    print(f"wrote {path}")
    return 0


def _cmd_backtest(args: argparse.Namespace) -> int:
    settings = _effective_settings(args)
    config, panel, agent_a, agent_b = _build_run_inputs(settings)
    report = run_backtest(config, panel, agent_a, agent_b)
    out_dir = _require(settings, "out")
    files = write_report(report, out_dir, extra_config=_cli_extras(settings))
    for line in metrics_table_lines(report):
        print(line.replace(",", "\t"))
    for path in files:
        print(f"wrote {path}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    settings = _effective_settings(args)
    grid_text = settings.get("tau_grid")
    if not grid_text:
        raise ValueError("missing required setting 'tau_grid'")
    grid = parse_tau_grid(grid_text)
    config, panel, agent_a, agent_b = _build_run_inputs(settings)
    rows = tau_sweep(config, grid, panel, agent_a, agent_b)
    out_dir = Path(_require(settings, "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep_path = write_sweep_csv(rows, out_dir / "sweep.csv")

    echo = dataclasses.asdict(config)
    echo["date_start"] = config.date_start.isoformat() if config.date_start else None
    echo["date_end"] = config.date_end.isoformat() if config.date_end else None
    echo.update(_cli_extras(settings))
    echo["tau_grid"] = grid
    config_path = out_dir / "config.json"
    config_path.write_text(json.dumps(echo, indent=2, sort_keys=True) + "\n")
    print(f"wrote {sweep_path}")
    print(f"wrote {config_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tauswitch",
        description="Dispersion-gated two-agent switching backtests",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fmt = argparse.ArgumentDefaultsHelpFormatter
    synth = sub.add_parser("synth", help="generate a synthetic OHLCV panel", formatter_class=fmt)
    synth.add_argument("--seed", type=int, default=0, help="generator seed")
    synth.add_argument("--tickers", type=int, default=5, help="number of tickers")
    synth.add_argument("--days", type=int, default=750, help="number of trading days")
    synth.add_argument("--start-date", default="2015-01-02", help="first calendar date")
    synth.add_argument("--out", required=True, help="output CSV path")
    synth.set_defaults(handler=_cmd_synth)

    def add_run_flags(sub_parser: argparse.ArgumentParser) -> None:
        sub_parser.add_argument("--config", default=None, help="key=value config file")
        sub_parser.add_argument("--data", default=None, help="OHLCV CSV path")
        sub_parser.add_argument(
            "--agent-a", dest="agent_a", default=None,
            help="buy_and_hold | momentum[:lookback] | replay CSV path",
        )
        sub_parser.add_argument(
            "--agent-b", dest="agent_b", default=None,
            help="buy_and_hold | momentum[:lookback] | replay CSV path",
        )
        sub_parser.add_argument("--group", type=int, default=None, help="classifier group 1..5 (default 3)")
        sub_parser.add_argument("--iterations", type=int, default=None, help="backtest iterations (default 30)")
        sub_parser.add_argument("--seed", type=int, default=None, help="base seed (default 0)")
        sub_parser.add_argument("--out", default=None, help="output directory")

    backtest = sub.add_parser("backtest", help="run one backtest", formatter_class=fmt)
    add_run_flags(backtest)
    backtest.add_argument("--tau", type=float, default=None, help="dispersion threshold in [0, 1] (default 0.5)")
    backtest.set_defaults(handler=_cmd_backtest)

    sweep = sub.add_parser("sweep", help="run a backtest per tau value", formatter_class=fmt)
    add_run_flags(sweep)
    sweep.add_argument(
        "--tau-grid", dest="tau_grid", default=None,
        help="comma-separated thresholds in [0, 1], e.g. 0.0,0.25,0.5",
    )
    sweep.set_defaults(handler=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
