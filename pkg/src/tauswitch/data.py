"""Market data loading, alignment, and derived series.

The close-price panel produced here drives everything downstream: simple
returns feed the momentum agent, and the Mahalanobis turbulence index feeds
the environment's buy-halt / liquidation rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date as Date
from pathlib import Path

import numpy as np
import pandas as pd

OHLCV_COLUMNS = ["date", "ticker", "open", "high", "low", "close", "volume"]

DEFAULT_TURBULENCE_WINDOW = 252
#: Ridge added to the trailing covariance before inversion so constant or
#: collinear return histories stay invertible.
COVARIANCE_RIDGE = 1e-8


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class OhlcvBar:
    """One day of one ticker; close is the execution price downstream."""

    date: Date
    ticker: str
    open: float
    high: float
    low: float
    close: float
    volume: int

    def __post_init__(self) -> None:
        if self.close <= 0:
            raise ValueError(f"non-positive close for {self.ticker} on {self.date}")
        if self.high < max(self.open, self.close):
            raise ValueError(f"high below open/close for {self.ticker} on {self.date}")
        if self.low > min(self.open, self.close):
            raise ValueError(f"low above open/close for {self.ticker} on {self.date}")
        if self.volume < 0:
            raise ValueError(f"negative volume for {self.ticker} on {self.date}")


@dataclass(frozen=True)
class PricePanel:
    """Aligned close prices: one row per date, one column per ticker.

    Every (date, ticker) cell is populated and strictly positive; dates are
    strictly increasing. Instances are immutable and safe to share across
    concurrent backtest workers.
    """

    dates: tuple[Date, ...]
    tickers: tuple[str, ...]
    close: np.ndarray  # (T, D) float

    def __post_init__(self) -> None:
        close = np.asarray(self.close, dtype=float)
        if close.ndim != 2 or close.shape != (len(self.dates), len(self.tickers)):
            raise ValueError("close matrix shape must be (len(dates), len(tickers))")
        if not np.all(np.isfinite(close)) or np.any(close <= 0):
            raise ValueError("panel prices must be finite and strictly positive")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("panel dates must be strictly increasing")
        object.__setattr__(self, "close", _freeze(close))

    @property
    def n_days(self) -> int:
        return len(self.dates)

    @property
    def n_tickers(self) -> int:
        return len(self.tickers)


@dataclass(frozen=True)
class TurbulenceSeries:
    """Per-date abnormality score of the daily return vector (>= 0)."""

    dates: tuple[Date, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.dates),):
            raise ValueError("values must align with dates")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("turbulence values must be finite and non-negative")
        object.__setattr__(self, "values", _freeze(values))


def load_panel(
    path: str | Path,
    tickers: list[str] | None = None,
    date_range: tuple[Date | str | None, Date | str | None] | None = None,
) -> PricePanel:
    """Load an OHLCV CSV and align it into a gap-free close-price panel.

    The CSV header must be exactly ``date,ticker,open,high,low,close,volume``
    with ISO-8601 dates. Dates missing for any requested ticker are dropped
    for all tickers (inner join); nothing is forward-filled.

    Raises ValueError on an absent ticker, a non-positive close price, or
    fewer than 2 surviving dates.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"data file not found: {path}")
    frame = pd.read_csv(path, dtype={"ticker": str})
    if list(frame.columns) != OHLCV_COLUMNS:
        raise ValueError(
            f"CSV header must be exactly {','.join(OHLCV_COLUMNS)}, "
            f"got {','.join(map(str, frame.columns))}"
        )
    frame["date"] = pd.to_datetime(frame["date"], format="%Y-%m-%d").dt.date

    if tickers is None:
        tickers = sorted(frame["ticker"].unique())
    else:
        available = set(frame["ticker"].unique())
        for ticker in tickers:
            if ticker not in available:
                raise ValueError(f"requested ticker '{ticker}' absent from {path}")
    frame = frame[frame["ticker"].isin(tickers)]

    if date_range is not None:
        start, end = date_range
        if start is not None:
            start = Date.fromisoformat(start) if isinstance(start, str) else start
            frame = frame[frame["date"] >= start]
        if end is not None:
            end = Date.fromisoformat(end) if isinstance(end, str) else end
            frame = frame[frame["date"] <= end]

    bad = frame[frame["close"] <= 0]
    if len(bad):
        row = bad.iloc[0]
        raise ValueError(
            f"non-positive price for {row['ticker']} on {row['date'].isoformat()}"
        )
    if frame.duplicated(subset=["date", "ticker"]).any():
        dup = frame[frame.duplicated(subset=["date", "ticker"])].iloc[0]
        raise ValueError(
            f"duplicate row for {dup['ticker']} on {dup['date'].isoformat()}"
        )

    wide = frame.pivot(index="date", columns="ticker", values="close")
    wide = wide.reindex(columns=tickers).dropna(axis=0, how="any").sort_index()
    if len(wide) < 2:
        raise ValueError("fewer than 2 dates survive alignment")
    return PricePanel(
        dates=tuple(wide.index),
        tickers=tuple(tickers),
        close=wide.to_numpy(dtype=float),
    )


def daily_returns(panel: PricePanel) -> np.ndarray:
    """Simple (arithmetic) returns, shape (T-1, D): r[t] = close[t+1]/close[t] - 1."""
    if panel.n_days < 2:
        raise ValueError("need at least 2 dates to compute returns")
    close = panel.close
    return close[1:] / close[:-1] - 1.0


def turbulence_index(
    panel: PricePanel,
    window: int = DEFAULT_TURBULENCE_WINDOW,
    ridge: float = COVARIANCE_RIDGE,
) -> TurbulenceSeries:
    """Mahalanobis distance of each day's return vector vs its trailing window.

    For each date with at least ``window`` prior return rows, the score is
    (y - mu) @ inv(Sigma + ridge*I) @ (y - mu) where mu and Sigma are the
    trailing-window mean and sample covariance. The series starts after a
    warm-up of ``window + 1`` panel dates.
    """
    n_assets = panel.n_tickers
    if window < n_assets + 2:
        raise ValueError(
            f"window {window} too small for {n_assets} tickers; need >= {n_assets + 2}"
        )
    if panel.n_days <= window:
        raise ValueError(f"panel has {panel.n_days} dates; need more than {window}")
    returns = daily_returns(panel)
    eye = np.eye(n_assets)
    values = np.empty(len(returns) - window)
    for t in range(window, len(returns)):
        trailing = returns[t - window : t]
        mu = trailing.mean(axis=0)
        cov = np.atleast_2d(np.cov(trailing, rowvar=False))
        diff = returns[t] - mu
        score = float(diff @ np.linalg.solve(cov + ridge * eye, diff))
        values[t - window] = max(score, 0.0)
    return TurbulenceSeries(dates=panel.dates[window + 1 :], values=values)
