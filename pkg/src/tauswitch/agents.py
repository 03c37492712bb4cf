"""The two holdings trajectories the ensemble switches between.

A trading agent enters the system purely as a per-date matrix of integer
share holdings. Externally trained policies are replayed from CSV files;
the built-in buy-and-hold and momentum baselines exist so the switcher has
two genuinely divergent strategies to choose from without any learning in
the loop. Every trajectory carries the cash ledger implied by executing its
holdings changes at close prices with zero cost, and construction fails on
the first date a row is unaffordable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date as Date
from pathlib import Path

import numpy as np
import pandas as pd

from .data import PricePanel

DEFAULT_INITIAL_BALANCE = 1_000_000.0
#: Fixed cadence (in trading days) at which the momentum baseline re-ranks.
MOMENTUM_REBALANCE_DAYS = 21

REPLAY_COLUMNS = ["date", "ticker", "shares"]


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class HoldingsTrajectory:
    """Per-date holdings of one agent, aligned to a price panel.

    cash[t] is the balance after the day-t trades settle at day-t close
    prices with zero transaction cost, starting from the shared initial
    balance.
    """

    dates: tuple[Date, ...]
    holdings: np.ndarray  # (T, D) int >= 0
    cash: np.ndarray  # (T,) float >= 0
    agent_id: int = 0
    label: str = ""

    def __post_init__(self) -> None:
        holdings = np.asarray(self.holdings, dtype=np.int64)
        cash = np.asarray(self.cash, dtype=float)
        if holdings.ndim != 2 or holdings.shape[0] != len(self.dates):
            raise ValueError("holdings must have one row per date")
        if np.any(holdings < 0):
            raise ValueError("holdings must be non-negative")
        if cash.shape != (len(self.dates),) or np.any(cash < 0):
            raise ValueError("cash ledger must be non-negative and align with dates")
        if self.agent_id not in (0, 1):
            raise ValueError("agent_id must be 0 or 1")
        object.__setattr__(self, "holdings", _freeze(holdings))
        object.__setattr__(self, "cash", _freeze(cash))


@dataclass(frozen=True)
class AgentSpec:
    """How to produce a trajectory: replay a file or run a built-in baseline."""

    kind: str  # replay | buy_and_hold | momentum
    path: str | None = None
    lookback: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("replay", "buy_and_hold", "momentum"):
            raise ValueError(f"unknown agent kind '{self.kind}'")
        if self.kind == "replay":
            if self.path is None or not Path(self.path).exists():
                raise ValueError(f"replay file not found: {self.path}")
        if self.kind == "momentum" and (self.lookback is None or self.lookback < 1):
            raise ValueError("momentum lookback must be >= 1")


def _cash_ledger(panel: PricePanel, holdings: np.ndarray, initial_balance: float) -> np.ndarray:
    """Replay the holdings changes at close prices (zero cost); fail when broke."""
    cash = np.empty(panel.n_days)
    previous = np.zeros(panel.n_tickers, dtype=np.int64)
    balance = float(initial_balance)
    for t in range(panel.n_days):
        delta = holdings[t] - previous
        balance -= float(panel.close[t] @ delta)
        if balance < 0:
            raise ValueError(
                f"unaffordable holdings row on {panel.dates[t].isoformat()}: "
                f"cash shortfall {-balance:.2f}"
            )
        cash[t] = balance
        previous = holdings[t]
    return cash


def replay_trajectory(
    path: str | Path,
    panel: PricePanel,
    initial_balance: float = DEFAULT_INITIAL_BALANCE,
    agent_id: int = 0,
    label: str | None = None,
) -> HoldingsTrajectory:
    """Load a holdings CSV (header date,ticker,shares) aligned to the panel.

    The file must provide a share count for every (panel date, panel ticker)
    pair; extra dates or tickers are ignored. Errors name the first offending
    date.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"replay file not found: {path}")
    frame = pd.read_csv(path, dtype={"ticker": str})
    if list(frame.columns) != REPLAY_COLUMNS:
        raise ValueError(
            f"replay CSV header must be exactly {','.join(REPLAY_COLUMNS)}, "
            f"got {','.join(map(str, frame.columns))}"
        )
    frame["date"] = pd.to_datetime(frame["date"], format="%Y-%m-%d").dt.date
    shares = frame.set_index(["date", "ticker"])["shares"]
    if shares.index.has_duplicates:
        raise ValueError("replay CSV contains duplicate (date, ticker) rows")

    holdings = np.zeros((panel.n_days, panel.n_tickers), dtype=np.int64)
    for t, day in enumerate(panel.dates):
        for d, ticker in enumerate(panel.tickers):
            try:
                value = shares.loc[(day, ticker)]
            except KeyError:
                raise ValueError(
                    f"replay file misses {ticker} on {day.isoformat()}"
                ) from None
            if value < 0:
                raise ValueError(f"negative shares for {ticker} on {day.isoformat()}")
            if float(value) != int(value):
                raise ValueError(f"non-integer shares for {ticker} on {day.isoformat()}")
            holdings[t, d] = int(value)
    cash = _cash_ledger(panel, holdings, initial_balance)
    return HoldingsTrajectory(
        dates=panel.dates,
        holdings=holdings,
        cash=cash,
        agent_id=agent_id,
        label=label if label is not None else path.stem,
    )


def buy_and_hold(
    panel: PricePanel,
    initial_balance: float = DEFAULT_INITIAL_BALANCE,
    agent_id: int = 0,
    label: str = "buy_and_hold",
) -> HoldingsTrajectory:
    """Split the balance equally across tickers on day 0 and never trade again."""
    budget = initial_balance / panel.n_tickers
    day0 = np.floor(budget / panel.close[0]).astype(np.int64)
    holdings = np.tile(day0, (panel.n_days, 1))
    cash = _cash_ledger(panel, holdings, initial_balance)
    return HoldingsTrajectory(
        dates=panel.dates, holdings=holdings, cash=cash, agent_id=agent_id, label=label
    )


def momentum_agent(
    panel: PricePanel,
    lookback: int,
    initial_balance: float = DEFAULT_INITIAL_BALANCE,
    agent_id: int = 0,
    label: str = "momentum",
) -> HoldingsTrajectory:
    """Hold the top half of tickers by trailing return, re-ranked periodically.

    All cash for the first `lookback` days. On each rebalance day (every
    MOMENTUM_REBALANCE_DAYS days from day `lookback`) the current mark-to-market
    wealth is split equally over the ceil(D/2) tickers with the highest
    trailing `lookback`-day return; rank ties break to the lower ticker index.
    """
    if lookback < 1:
        raise ValueError("lookback must be >= 1")
    if lookback >= panel.n_days:
        raise ValueError(
            f"lookback {lookback} must be smaller than panel length {panel.n_days}"
        )
    n_top = math.ceil(panel.n_tickers / 2)
    holdings = np.zeros((panel.n_days, panel.n_tickers), dtype=np.int64)
    current = np.zeros(panel.n_tickers, dtype=np.int64)
    balance = float(initial_balance)
    for t in range(panel.n_days):
        if t >= lookback and (t - lookback) % MOMENTUM_REBALANCE_DAYS == 0:
            prices_t = panel.close[t]
            trailing = prices_t / panel.close[t - lookback] - 1.0
            ranked = np.argsort(-trailing, kind="stable")
            wealth = balance + float(prices_t @ current)
            budget = wealth / n_top
            current = np.zeros(panel.n_tickers, dtype=np.int64)
            for d in ranked[:n_top]:
                current[d] = int(budget / prices_t[d])
            balance = wealth - float(prices_t @ current)
        holdings[t] = current
    cash = _cash_ledger(panel, holdings, initial_balance)
    return HoldingsTrajectory(
        dates=panel.dates, holdings=holdings, cash=cash, agent_id=agent_id, label=label
    )


def build_agent(
    spec: AgentSpec,
    panel: PricePanel,
    initial_balance: float = DEFAULT_INITIAL_BALANCE,
    agent_id: int = 0,
) -> HoldingsTrajectory:
    """Materialize a trajectory from an AgentSpec."""
    if spec.kind == "replay":
        return replay_trajectory(spec.path, panel, initial_balance, agent_id=agent_id)
    if spec.kind == "buy_and_hold":
        return buy_and_hold(panel, initial_balance, agent_id=agent_id)
    return momentum_agent(panel, spec.lookback, initial_balance, agent_id=agent_id)
