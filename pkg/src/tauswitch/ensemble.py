"""Dispersion-gated switching between two agents' holdings.

Each day, every classifier scores how confidently each agent's holdings
sample is recognized as that agent's own (the candidate matrix). A single
dispersion statistic of the two holdings rows decides the stance: below the
threshold tau each classifier backs its highest-confidence agent, at or above
it the lowest. A majority vote picks the winning agent, and the emitted trade
is the exact share delta from the current position to that agent's row. The
method always switches to one agent's holdings verbatim, never blends.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date as Date

import numpy as np

DEFAULT_EPSILON = 1e-8


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class DispersionStats:
    """Per-dimension holdings spread and its min-max-normalized mean.

    per_dim_std is in shares; normalized entries and mean_normalized live in
    [0, 1]. epsilon guards the min-max denominator, so a single dimension (or
    equal spread everywhere) normalizes to 0.
    """

    per_dim_std: np.ndarray
    normalized: np.ndarray
    mean_normalized: float
    epsilon: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_dim_std", _freeze(np.asarray(self.per_dim_std, float)))
        object.__setattr__(self, "normalized", _freeze(np.asarray(self.normalized, float)))


@dataclass(frozen=True)
class DecisionRecord:
    """One audit row per step: inputs, per-classifier picks, vote, net action."""

    date: Date | None
    sigma_bar: float
    tau: float
    picks: tuple[int, ...]
    votes: tuple[int, int]
    final_agent: int
    final_holdings: np.ndarray
    ours_action: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "final_holdings", _freeze(np.asarray(self.final_holdings, np.int64)))
        object.__setattr__(self, "ours_action", _freeze(np.asarray(self.ours_action, np.int64)))

    def csv_row(self) -> list[str]:
        """Serialize in the audit-log column order (without header)."""
        return [
            self.date.isoformat() if self.date is not None else "",
            f"{self.sigma_bar:.10g}",
            f"{self.tau:.10g}",
            "|".join(str(p) for p in self.picks),
            "|".join(str(v) for v in self.votes),
            str(self.final_agent),
            *(str(a) for a in self.ours_action),
        ]


def decision_csv_header(tickers: tuple[str, ...]) -> list[str]:
    return ["date", "sigma_bar", "tau", "picks", "votes", "final_agent"] + [
        f"action_{t}" for t in tickers
    ]


def build_candidate_matrix(
    p_list: list[np.ndarray], true_labels: tuple[int, ...]
) -> np.ndarray:
    """Collect each classifier's confidence in each sample's true agent.

    p_list holds one probability matrix per classifier with a row per agent
    sample; entry [i, j] of the result is classifier i's probability that
    sample j belongs to its true agent true_labels[j].
    """
    n_samples = len(true_labels)
    if not p_list:
        raise ValueError("need at least one classifier output")
    matrix = np.empty((len(p_list), n_samples))
    for i, probs in enumerate(p_list):
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (n_samples, 2):
            raise ValueError(
                f"classifier {i} output has shape {probs.shape}, expected ({n_samples}, 2)"
            )
        matrix[i] = probs[np.arange(n_samples), list(true_labels)]
    return matrix


def dispersion(holdings_pair: np.ndarray, epsilon: float = DEFAULT_EPSILON) -> DispersionStats:
    """Spread of the two holdings rows per dimension, min-max normalized.

    For two agents the per-dimension standard deviation (population, over the
    two rows) reduces to half the absolute holdings gap.
    """
    holdings_pair = np.asarray(holdings_pair, dtype=float)
    if holdings_pair.ndim != 2 or holdings_pair.shape[0] != 2:
        raise ValueError("expected a 2 x D holdings matrix")
    spread = np.abs(holdings_pair[0] - holdings_pair[1]) / 2.0
    low, high = spread.min(), spread.max()
    normalized = (spread - low) / (high - low + epsilon)
    return DispersionStats(
        per_dim_std=spread,
        normalized=normalized,
        mean_normalized=float(normalized.mean()),
        epsilon=epsilon,
    )


def select_per_classifier(q: np.ndarray, sigma_bar: float, tau: float) -> np.ndarray:
    """Per-classifier agent pick: argmax below tau, argmin at or above.

    Row ties break to agent 0 in both branches.
    """
    q = np.asarray(q, dtype=float)
    if sigma_bar < tau:
        return np.argmax(q, axis=1)
    return np.argmin(q, axis=1)


def vote(picks: np.ndarray, q: np.ndarray | None = None) -> int:
    """Majority winner; even split defers to the higher column mean of q, then agent 0."""
    picks = np.asarray(picks)
    count_one = int(np.sum(picks == 1))
    count_zero = len(picks) - count_one
    if count_zero != count_one:
        return 0 if count_zero > count_one else 1
    if q is not None:
        means = np.asarray(q, dtype=float).mean(axis=0)
        if means[1] > means[0]:
            return 1
    return 0


def ours_action(current_holdings: np.ndarray, target_holdings: np.ndarray) -> np.ndarray:
    """Net share delta moving the portfolio from current to target holdings."""
    current = np.asarray(current_holdings, dtype=np.int64)
    target = np.asarray(target_holdings, dtype=np.int64)
    if current.shape != target.shape:
        raise ValueError("holdings vectors must share a dimension")
    return target - current


def decide(
    holdings_pair: np.ndarray,
    p_list: list[np.ndarray],
    true_labels: tuple[int, ...],
    tau: float,
    current_holdings: np.ndarray,
    epsilon: float = DEFAULT_EPSILON,
    date: Date | None = None,
) -> DecisionRecord:
    """Run the full per-step pipeline and return the audit record.

    Candidate matrix -> dispersion -> per-classifier selection -> vote ->
    net action. final_holdings is the winning agent's row of holdings_pair,
    verbatim.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must be in [0, 1]")
    q = build_candidate_matrix(p_list, true_labels)
    stats = dispersion(holdings_pair, epsilon)
    picks = select_per_classifier(q, stats.mean_normalized, tau)
    winner = vote(picks, q)
    final_holdings = np.asarray(holdings_pair[winner], dtype=np.int64)
    action = ours_action(current_holdings, final_holdings)
    count_one = int(np.sum(picks == 1))
    return DecisionRecord(
        date=date,
        sigma_bar=stats.mean_normalized,
        tau=tau,
        picks=tuple(int(p) for p in picks),
        votes=(len(picks) - count_one, count_one),
        final_agent=winner,
        final_holdings=final_holdings,
        ours_action=action,
    )
