"""Portfolio environment: integer-share state, feasibility clipping, costs.

The state is (prices, holdings, balance). Trades fill at the current day's
close; the transaction cost is a flat fraction of traded notional, charged
once through the balance, so per-step rewards telescope exactly to the total
portfolio-value change. A turbulence reading above the configured threshold
replaces the day's action with full liquidation (sell everything, buy
nothing).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PortfolioState:
    """Immutable snapshot: prices (currency/share), integer holdings, cash."""

    prices: np.ndarray  # (D,) float > 0
    holdings: np.ndarray  # (D,) int >= 0
    balance: float
    date_index: int = 0

    def __post_init__(self) -> None:
        prices = np.asarray(self.prices, dtype=float)
        holdings = np.asarray(self.holdings, dtype=np.int64)
        if prices.ndim != 1 or holdings.shape != prices.shape:
            raise ValueError("prices and holdings must be 1-D vectors of equal length")
        if np.any(prices <= 0) or not np.all(np.isfinite(prices)):
            raise ValueError("prices must be finite and strictly positive")
        if np.any(holdings < 0):
            raise ValueError("holdings must be non-negative")
        if self.balance < 0:
            raise ValueError("balance must be non-negative")
        if self.balance + float(prices @ holdings) <= 0:
            raise ValueError("portfolio value must be strictly positive")
        object.__setattr__(self, "prices", _freeze(prices))
        object.__setattr__(self, "holdings", _freeze(holdings))


@dataclass(frozen=True)
class TradeAction:
    """Per-ticker share deltas: negative sells, zero holds, positive buys."""

    deltas: np.ndarray  # (D,) int

    def __post_init__(self) -> None:
        deltas = np.asarray(self.deltas, dtype=np.int64)
        if deltas.ndim != 1:
            raise ValueError("deltas must be a 1-D vector")
        object.__setattr__(self, "deltas", _freeze(deltas))


@dataclass(frozen=True)
class EnvConfig:
    """cost_rate: fraction of traded notional per trade; threshold None disables the halt."""

    cost_rate: float = 0.001
    turbulence_threshold: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.cost_rate < 1.0:
            raise ValueError("cost_rate must be in [0, 1)")
        if self.turbulence_threshold is not None and self.turbulence_threshold < 0:
            raise ValueError("turbulence_threshold must be non-negative or None")


def portfolio_value(state: PortfolioState) -> float:
    """Cash plus holdings marked at the state's own prices."""
    return state.balance + float(state.prices @ state.holdings)


def _settle(balance: float, prices: np.ndarray, deltas: np.ndarray, cost_rate: float) -> float:
    """Balance after executing deltas at `prices` with cost on traded notional.

    clip_action and step must share this exact expression so that any action
    accepted by the clipper settles to a non-negative balance bit-for-bit.
    """
    buys = np.where(deltas > 0, deltas, 0)
    sells = np.where(deltas < 0, -deltas, 0)
    buy_notional = float(prices @ buys)
    sell_notional = float(prices @ sells)
    cost = cost_rate * (buy_notional + sell_notional)
    return balance - buy_notional + sell_notional - cost


def clip_action(state: PortfolioState, raw: TradeAction, cost_rate: float) -> TradeAction:
    """Reduce a requested action to a feasible one.

    Sells are clipped to held shares and settle first; buys are then admitted
    in ascending ticker index, each cut to the largest integer share count the
    remaining cash (net of all costs) affords. Always returns a feasible,
    possibly zero, action.
    """
    if raw.deltas.shape != state.holdings.shape:
        raise ValueError("action dimension does not match state")
    clipped = np.maximum(raw.deltas, -state.holdings)
    trial = np.where(clipped < 0, clipped, 0)
    prices = state.prices
    for d in np.flatnonzero(clipped > 0):
        remaining = _settle(state.balance, prices, trial, cost_rate)
        unit = prices[d] * (1.0 + cost_rate)
        quantity = min(int(clipped[d]), int(remaining / unit + 1e-12))
        trial[d] = quantity
        # Guard against the floor estimate being one share too generous.
        while quantity > 0 and _settle(state.balance, prices, trial, cost_rate) < 0:
            quantity -= 1
            trial[d] = quantity
    return TradeAction(trial)


def liquidation_action(state: PortfolioState) -> TradeAction:
    """Sell every held share, buy nothing."""
    return TradeAction(-state.holdings)


def step(
    state: PortfolioState,
    action: TradeAction,
    next_prices: np.ndarray,
    config: EnvConfig,
    turbulence: float | None = None,
) -> tuple[PortfolioState, float]:
    """Execute a feasible action at current prices and advance to next_prices.

    Returns the successor state and reward = change in portfolio value. An
    infeasible action (negative resulting holdings or balance) raises: callers
    are expected to route through clip_action first.
    """
    next_prices = np.asarray(next_prices, dtype=float)
    deltas = action.deltas
    if (
        turbulence is not None
        and config.turbulence_threshold is not None
        and turbulence > config.turbulence_threshold
    ):
        deltas = -state.holdings
    new_holdings = state.holdings + deltas
    if np.any(new_holdings < 0):
        raise ValueError("infeasible action: sells exceed holdings")
    new_balance = _settle(state.balance, state.prices, deltas, config.cost_rate)
    if new_balance < 0:
        raise ValueError("infeasible action: balance would go negative")
    new_state = PortfolioState(
        prices=next_prices,
        holdings=new_holdings,
        balance=new_balance,
        date_index=state.date_index + 1,
    )
    reward = portfolio_value(new_state) - portfolio_value(state)
    return new_state, reward
