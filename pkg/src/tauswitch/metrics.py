"""Risk and return metrics over portfolio-value series.

Four measures: cumulative return, maximum drawdown, annualized Sharpe ratio,
and Calmar ratio. Drawdown is computed as a positive fraction; report
serialization additionally emits the negated value, the sign convention used
in comparison tables. 252 trading days per year throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date as Date

import numpy as np

TRADING_DAYS_PER_YEAR = 252
#: Dispersion below this is treated as zero, making Sharpe/Calmar undefined.
_DEGENERATE = 1e-12


class UndefinedMetricError(ValueError):
    """Raised instead of returning +/-inf when a ratio's denominator is zero."""


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class EquitySeries:
    """Daily portfolio values, strictly positive, at least two points."""

    dates: tuple[Date, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.dates),):
            raise ValueError("values must align with dates")
        if len(values) < 2:
            raise ValueError("equity series needs at least 2 points")
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise ValueError("equity values must be finite and strictly positive")
        object.__setattr__(self, "values", _freeze(values))

    def daily_returns(self) -> np.ndarray:
        return self.values[1:] / self.values[:-1] - 1.0


def cumulative_return(series: EquitySeries) -> float:
    """Final over initial value minus one."""
    values = series.values
    return float(values[-1] / values[0] - 1.0)


def max_drawdown(series: EquitySeries) -> float:
    """Largest peak-to-subsequent-trough fractional loss, in [0, 1).

    Single streaming pass over the running peak; equals the all-pairs
    max over i < j of 1 - P[j]/P[i].
    """
    values = series.values
    peak = values[0]
    worst = 0.0
    for value in values[1:]:
        if value > peak:
            peak = value
        else:
            worst = max(worst, 1.0 - value / peak)
    return worst


def sharpe_ratio(daily: np.ndarray, risk_free_annual: float = 0.0) -> float:
    """Annualized mean excess daily return over its sample standard deviation.

    Zero dispersion with zero mean excess (returns pinned at the risk-free
    rate) is 0 by convention; zero dispersion with nonzero excess has no
    finite Sharpe and raises.
    """
    daily = np.asarray(daily, dtype=float)
    if len(daily) < 2:
        raise ValueError("need at least 2 daily returns")
    excess = daily - risk_free_annual / TRADING_DAYS_PER_YEAR
    spread = float(np.std(excess, ddof=1))
    if spread < _DEGENERATE:
        if abs(float(np.mean(excess))) < _DEGENERATE:
            return 0.0
        raise UndefinedMetricError("undefined Sharpe: zero return dispersion")
    return float(np.mean(excess) / spread * np.sqrt(TRADING_DAYS_PER_YEAR))


def annualized_return(series: EquitySeries) -> float:
    """Compound growth rate scaled to a 252-day year."""
    values = series.values
    periods = len(values) - 1
    return float((values[-1] / values[0]) ** (TRADING_DAYS_PER_YEAR / periods) - 1.0)


def calmar_ratio(series: EquitySeries, risk_free_annual: float = 0.0) -> float:
    """Annualized excess return divided by the maximum drawdown magnitude."""
    drawdown = max_drawdown(series)
    if drawdown < _DEGENERATE:
        raise UndefinedMetricError("undefined Calmar: zero drawdown")
    return (annualized_return(series) - risk_free_annual) / drawdown


@dataclass(frozen=True)
class MetricReport:
    """The four metrics for one strategy; max_drawdown stored as a positive fraction."""

    cumulative_return: float
    sharpe: float
    calmar: float
    max_drawdown: float
    risk_free_rate: float = 0.0

    @classmethod
    def from_equity(cls, series: EquitySeries, risk_free_annual: float = 0.0) -> "MetricReport":
        return cls(
            cumulative_return=cumulative_return(series),
            sharpe=sharpe_ratio(series.daily_returns(), risk_free_annual),
            calmar=calmar_ratio(series, risk_free_annual),
            max_drawdown=max_drawdown(series),
            risk_free_rate=risk_free_annual,
        )

    def table_row(self) -> dict[str, float]:
        """Column names and sign conventions of the comparison-table format."""
        return {
            "cumulative_returns": self.cumulative_return,
            "sharpe_ratio": self.sharpe,
            "calmar_ratio": self.calmar,
            "max_drawdown": -self.max_drawdown,
        }


TABLE_METRIC_COLUMNS = ["cumulative_returns", "sharpe_ratio", "calmar_ratio", "max_drawdown"]


def average_reports(reports: list[MetricReport]) -> MetricReport:
    """Arithmetic field-wise mean across iterations."""
    if not reports:
        raise ValueError("no reports to average")
    return MetricReport(
        cumulative_return=float(np.mean([r.cumulative_return for r in reports])),
        sharpe=float(np.mean([r.sharpe for r in reports])),
        calmar=float(np.mean([r.calmar for r in reports])),
        max_drawdown=float(np.mean([r.max_drawdown for r in reports])),
        risk_free_rate=reports[0].risk_free_rate,
    )
