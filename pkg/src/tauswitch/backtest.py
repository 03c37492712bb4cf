"""Full experiment protocol: scheduling, refits, decisions, and reporting.

A run walks the panel day by day. After a warm-up of `validation_window`
days the classifier group is refit every `rebalance_window` days on the
trailing window of both agents' holdings features (window days x 2 agents
samples), and each day the decision block picks one agent's holdings row to
hold. During warm-up the portfolio simply follows agent 0. Both base agents
are also replayed through the same environment for comparison. Iterations
re-run the trading phase with different classifier seeds (fold assignment
and any stochastic fitting) while data and agents stay fixed; reported
metrics are arithmetic means over iterations.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from datetime import date as Date
from pathlib import Path

import numpy as np

from . import ensemble
from .agents import HoldingsTrajectory
from .classifiers import ClassifierSpec, StandardScaler, canonical_specs, grid_search_cv
from .data import DEFAULT_TURBULENCE_WINDOW, PricePanel, turbulence_index
from .ensemble import DecisionRecord, decision_csv_header
from .market_env import EnvConfig, PortfolioState, TradeAction, clip_action, portfolio_value, step
from .metrics import (
    TABLE_METRIC_COLUMNS,
    EquitySeries,
    MetricReport,
    average_reports,
)

STRATEGY_KEYS = ("ensemble", "agent_a", "agent_b")


@dataclass(frozen=True)
class BacktestConfig:
    """Everything a run needs beyond the data and the two agents."""

    tau: float = 0.5
    classifier_group: int = 3
    initial_balance: float = 1_000_000.0
    cost_rate: float = 0.001
    turbulence_threshold: float | None = None
    turbulence_window: int = DEFAULT_TURBULENCE_WINDOW
    validation_window: int = 60
    rebalance_window: int = 63
    iterations: int = 30
    seed: int = 0
    epsilon: float = 1e-8
    risk_free_rate: float = 0.0
    date_start: Date | None = None
    date_end: Date | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must be in [0, 1]")
        if self.classifier_group not in (1, 2, 3, 4, 5):
            raise ValueError("classifier_group must be in 1..5")
        if self.initial_balance <= 0:
            raise ValueError("initial_balance must be positive")
        if not 0.0 <= self.cost_rate < 1.0:
            raise ValueError("cost_rate must be in [0, 1)")
        if self.turbulence_threshold is not None and self.turbulence_threshold < 0:
            raise ValueError("turbulence_threshold must be non-negative or unset")
        if self.validation_window < 1:
            raise ValueError("validation_window must be >= 1")
        if self.rebalance_window < 1:
            raise ValueError("rebalance_window must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class BacktestReport:
    """Per-iteration curves and logs plus iteration-averaged metrics."""

    config: BacktestConfig
    dates: tuple[Date, ...]
    tickers: tuple[str, ...]
    equity_curves: dict[str, tuple[EquitySeries, ...]]
    decision_logs: tuple[tuple[DecisionRecord, ...], ...]
    metrics: dict[str, MetricReport]
    metrics_per_iteration: dict[str, tuple[MetricReport, ...]]
    refit_day_indices: tuple[int, ...]
    agent_labels: tuple[str, str]

    def mean_equity(self, strategy: str) -> np.ndarray:
        curves = self.equity_curves[strategy]
        return np.mean([series.values for series in curves], axis=0)


def classifier_group(group_id: int) -> list[ClassifierSpec]:
    """The five fixed ensembles: SVM kernels, penalties, criteria, and unions."""
    if group_id not in (1, 2, 3, 4, 5):
        raise ValueError(f"classifier group must be in 1..5, got {group_id}")
    by_family: dict[str, list[ClassifierSpec]] = {"svm": [], "tree": [], "logreg": []}
    for spec in canonical_specs():
        by_family[spec.family].append(spec)
    groups = {
        1: by_family["svm"],
        2: by_family["logreg"],
        3: by_family["tree"],
        4: by_family["svm"] + by_family["logreg"],
        5: by_family["svm"] + by_family["logreg"] + by_family["tree"],
    }
    return list(groups[group_id])


def agent_feature_matrix(panel: PricePanel, trajectory: HoldingsTrajectory) -> np.ndarray:
    """Per-day features: portfolio weights concatenated with the 1-day holdings change.

    Weights are price * shares over total portfolio value (cash included) so
    they stay in [0, 1] even while the agent is partly in cash.
    """
    values = trajectory.holdings * panel.close
    total = trajectory.cash + values.sum(axis=1)
    weights = values / total[:, None]
    changes = np.diff(trajectory.holdings, axis=0, prepend=np.zeros((1, panel.n_tickers)))
    return np.hstack([weights, changes.astype(float)])


def _child_seed(*branch: int) -> int:
    return int(np.random.SeedSequence(list(branch)).generate_state(1)[0])


def _turbulence_lookup(panel: PricePanel, config: BacktestConfig):
    """Map a panel day index to the turbulence value known that day (or None)."""
    if config.turbulence_threshold is None:
        return lambda t: None
    if panel.n_days <= config.turbulence_window + 1:
        raise ValueError(
            f"turbulence window {config.turbulence_window} larger than available history"
        )
    series = turbulence_index(panel, window=config.turbulence_window)
    offset = config.turbulence_window + 1
    values = series.values
    return lambda t: float(values[t - offset]) if t >= offset else None


def _replay_targets(
    panel: PricePanel,
    targets: np.ndarray,
    config: BacktestConfig,
    turbulence_at,
) -> np.ndarray:
    """Follow a target-holdings schedule through the environment; returns equity."""
    env_config = EnvConfig(config.cost_rate, config.turbulence_threshold)
    state = PortfolioState(
        prices=panel.close[0],
        holdings=np.zeros(panel.n_tickers, dtype=np.int64),
        balance=config.initial_balance,
    )
    equity = np.empty(panel.n_days)
    equity[0] = portfolio_value(state)
    for t in range(panel.n_days - 1):
        raw = TradeAction(targets[t] - state.holdings)
        action = clip_action(state, raw, config.cost_rate)
        state, _ = step(state, action, panel.close[t + 1], env_config, turbulence_at(t))
        equity[t + 1] = portfolio_value(state)
    return equity


def run_backtest(
    config: BacktestConfig,
    panel: PricePanel,
    agent_a: HoldingsTrajectory,
    agent_b: HoldingsTrajectory,
) -> BacktestReport:
    """Execute the full protocol and collect every curve, log, and metric."""
    for name, trajectory in (("agent_a", agent_a), ("agent_b", agent_b)):
        if trajectory.dates != panel.dates:
            raise ValueError(f"{name} trajectory dates do not match the panel")
    agent_a = dataclasses.replace(agent_a, agent_id=0)
    agent_b = dataclasses.replace(agent_b, agent_id=1)

    n_days = panel.n_days
    warmup = config.validation_window
    decision_days = (n_days - 1) - warmup
    if decision_days < 1:
        raise ValueError(
            f"validation window {warmup} larger than available history ({n_days} dates)"
        )
    refit_days = tuple(range(warmup, n_days - 1, config.rebalance_window))
    assert len(refit_days) == math.ceil(decision_days / config.rebalance_window)

    specs = classifier_group(config.classifier_group)
    features = {
        0: agent_feature_matrix(panel, agent_a),
        1: agent_feature_matrix(panel, agent_b),
    }
    turbulence_at = _turbulence_lookup(panel, config)
    env_config = EnvConfig(config.cost_rate, config.turbulence_threshold)

    base_equity = {
        "agent_a": _replay_targets(panel, agent_a.holdings, config, turbulence_at),
        "agent_b": _replay_targets(panel, agent_b.holdings, config, turbulence_at),
    }

    curves: dict[str, list[EquitySeries]] = {key: [] for key in STRATEGY_KEYS}
    logs: list[tuple[DecisionRecord, ...]] = []
    per_iteration: dict[str, list[MetricReport]] = {key: [] for key in STRATEGY_KEYS}

    for iteration in range(config.iterations):
        equity, records = _run_ensemble_iteration(
            config, panel, agent_a, agent_b, specs, features, turbulence_at, env_config,
            refit_days, iteration,
        )
        logs.append(tuple(records))
        series = {
            "ensemble": EquitySeries(panel.dates, equity),
            "agent_a": EquitySeries(panel.dates, base_equity["agent_a"]),
            "agent_b": EquitySeries(panel.dates, base_equity["agent_b"]),
        }
        for key in STRATEGY_KEYS:
            curves[key].append(series[key])
            per_iteration[key].append(
                MetricReport.from_equity(series[key], config.risk_free_rate)
            )

    return BacktestReport(
        config=config,
        dates=panel.dates,
        tickers=panel.tickers,
        equity_curves={key: tuple(curves[key]) for key in STRATEGY_KEYS},
        decision_logs=tuple(logs),
        metrics={key: average_reports(per_iteration[key]) for key in STRATEGY_KEYS},
        metrics_per_iteration={key: tuple(per_iteration[key]) for key in STRATEGY_KEYS},
        refit_day_indices=refit_days,
        agent_labels=(agent_a.label, agent_b.label),
    )


def _run_ensemble_iteration(
    config: BacktestConfig,
    panel: PricePanel,
    agent_a: HoldingsTrajectory,
    agent_b: HoldingsTrajectory,
    specs: list[ClassifierSpec],
    features: dict[int, np.ndarray],
    turbulence_at,
    env_config: EnvConfig,
    refit_days: tuple[int, ...],
    iteration: int,
) -> tuple[np.ndarray, list[DecisionRecord]]:
    state = PortfolioState(
        prices=panel.close[0],
        holdings=np.zeros(panel.n_tickers, dtype=np.int64),
        balance=config.initial_balance,
    )
    equity = np.empty(panel.n_days)
    equity[0] = portfolio_value(state)
    records: list[DecisionRecord] = []
    scaler: StandardScaler | None = None
    models: list | None = None
    refit_index = -1

    for t in range(panel.n_days - 1):
        if t in refit_days:
            refit_index += 1
            window = slice(t - config.validation_window, t)
            train_x = np.vstack([features[0][window], features[1][window]])
            train_y = np.concatenate(
                [
                    np.zeros(config.validation_window, dtype=np.int64),
                    np.ones(config.validation_window, dtype=np.int64),
                ]
            )
            scaler = StandardScaler().fit(train_x)
            scaled = scaler.transform(train_x)
            models = [
                grid_search_cv(
                    spec,
                    scaled,
                    train_y,
                    folds=5,
                    seed=_child_seed(config.seed, iteration, refit_index, spec_index),
                )
                for spec_index, spec in enumerate(specs)
            ]

        if models is None:
            target = agent_a.holdings[t]
        else:
            day_x = scaler.transform(
                np.vstack([features[0][t], features[1][t]])
            )
            p_list = [model.predict_proba(day_x) for model in models]
            holdings_pair = np.vstack([agent_a.holdings[t], agent_b.holdings[t]])
            record = ensemble.decide(
                holdings_pair,
                p_list,
                (0, 1),
                config.tau,
                state.holdings,
                epsilon=config.epsilon,
                date=panel.dates[t],
            )
            records.append(record)
            target = record.final_holdings

        raw = TradeAction(target - state.holdings)
        action = clip_action(state, raw, config.cost_rate)
        state, _ = step(state, action, panel.close[t + 1], env_config, turbulence_at(t))
        equity[t + 1] = portfolio_value(state)
    return equity, records


def tau_sweep(
    config: BacktestConfig,
    tau_grid: list[float],
    panel: PricePanel,
    agent_a: HoldingsTrajectory,
    agent_b: HoldingsTrajectory,
) -> list[tuple[float, dict[str, MetricReport]]]:
    """One full backtest per threshold, re-using the same seeds for pairing."""
    if not tau_grid:
        raise ValueError("tau grid must not be empty")
    for value in tau_grid:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"tau grid values must be in [0, 1], got {value}")
    rows = []
    for value in tau_grid:
        run_config = dataclasses.replace(config, tau=value)
        report = run_backtest(run_config, panel, agent_a, agent_b)
        rows.append((value, report.metrics))
    return rows


def _format(value: float) -> str:
    return f"{value:.10g}"


def metrics_table_lines(report: BacktestReport) -> list[str]:
    """metrics.csv content: one row per strategy in comparison-table order."""
    header = "strategy,classifier_group,tau," + ",".join(TABLE_METRIC_COLUMNS)
    lines = [header]
    for key in STRATEGY_KEYS:
        row = report.metrics[key].table_row()
        group = str(report.config.classifier_group) if key == "ensemble" else "-"
        tau = _format(report.config.tau) if key == "ensemble" else "-"
        cells = [key, group, tau] + [_format(row[col]) for col in TABLE_METRIC_COLUMNS]
        lines.append(",".join(cells))
    return lines


def write_report(
    report: BacktestReport, out_dir: str | Path, extra_config: dict | None = None
) -> list[Path]:
    """Write metrics.csv, equity.csv, decisions.csv, and config.json.

    Output is byte-deterministic for a fixed report: 10-significant-digit
    decimals, ISO dates, LF line endings. decisions.csv carries the first
    iteration's log (iterations differ only in classifier seeding).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    metrics_path = out_dir / "metrics.csv"
    metrics_path.write_text("\n".join(metrics_table_lines(report)) + "\n")

    equity_path = out_dir / "equity.csv"
    means = {key: report.mean_equity(key) for key in STRATEGY_KEYS}
    lines = ["date," + ",".join(STRATEGY_KEYS)]
    for t, day in enumerate(report.dates):
        lines.append(
            day.isoformat() + "," + ",".join(_format(means[key][t]) for key in STRATEGY_KEYS)
        )
    equity_path.write_text("\n".join(lines) + "\n")

    decisions_path = out_dir / "decisions.csv"
    lines = [",".join(decision_csv_header(report.tickers))]
    for record in report.decision_logs[0]:
        lines.append(",".join(record.csv_row()))
    decisions_path.write_text("\n".join(lines) + "\n")

    config_path = out_dir / "config.json"
    payload = dataclasses.asdict(report.config)
    payload["date_start"] = report.config.date_start.isoformat() if report.config.date_start else None
    payload["date_end"] = report.config.date_end.isoformat() if report.config.date_end else None
    payload["agent_labels"] = list(report.agent_labels)
    if extra_config:
        payload.update(extra_config)
    config_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    return [metrics_path, equity_path, decisions_path, config_path]


def sweep_table_lines(rows: list[tuple[float, dict[str, MetricReport]]]) -> list[str]:
    """sweep.csv content: one row per threshold, metric columns per strategy."""
    header = ["tau"]
    for key in STRATEGY_KEYS:
        header += [f"{key}_{col}" for col in TABLE_METRIC_COLUMNS]
    lines = [",".join(header)]
    for tau, metric_map in rows:
        cells = [_format(tau)]
        for key in STRATEGY_KEYS:
            row = metric_map[key].table_row()
            cells += [_format(row[col]) for col in TABLE_METRIC_COLUMNS]
        lines.append(",".join(cells))
    return lines


def write_sweep_csv(rows: list[tuple[float, dict[str, MetricReport]]], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(sweep_table_lines(rows)) + "\n")
    return path
