"""Dispersion-gated switching between two trading agents, with a backtest harness.

The pipeline: a close-price panel drives a portfolio environment with
integer shares and transaction costs; two agents supply daily holdings
trajectories; a group of from-scratch classifiers scores each agent's
holdings sample; and a threshold on the holdings-dispersion statistic gates
each classifier between backing its most- and least-confident agent before a
majority vote picks the holdings to adopt.
"""

from .agents import (
    AgentSpec,
    HoldingsTrajectory,
    build_agent,
    buy_and_hold,
    momentum_agent,
    replay_trajectory,
)
from .backtest import (
    BacktestConfig,
    BacktestReport,
    classifier_group,
    run_backtest,
    tau_sweep,
    write_report,
)
from .data import PricePanel, TurbulenceSeries, daily_returns, load_panel, turbulence_index
from .ensemble import (
    DecisionRecord,
    DispersionStats,
    build_candidate_matrix,
    decide,
    dispersion,
    ours_action,
    select_per_classifier,
    vote,
)
from .market_env import (
    EnvConfig,
    PortfolioState,
    TradeAction,
    clip_action,
    portfolio_value,
    step,
)
from .metrics import (
    EquitySeries,
    MetricReport,
    UndefinedMetricError,
    calmar_ratio,
    cumulative_return,
    max_drawdown,
    sharpe_ratio,
)

__version__ = "0.1.0"
