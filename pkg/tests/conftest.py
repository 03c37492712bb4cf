import numpy as np
import pytest

from tauswitch.agents import buy_and_hold, momentum_agent
from tauswitch.classifiers import standardize
from tauswitch.cli import synth_panel
from tauswitch.data import load_panel


@pytest.fixture(scope="session")
def gbm_csv(tmp_path_factory):
    """The standard desk-scale fixture: 5 tickers, 750 trading days, seed 42."""
    path = tmp_path_factory.mktemp("data") / "gbm_panel.csv"
    synth_panel(seed=42, n_tickers=5, n_days=750, out=path)
    return path


@pytest.fixture(scope="session")
def gbm_panel(gbm_csv):
    return load_panel(gbm_csv)


@pytest.fixture(scope="session")
def gbm_agents(gbm_panel):
    return buy_and_hold(gbm_panel), momentum_agent(gbm_panel, lookback=63)


@pytest.fixture(scope="session")
def small_csv(tmp_path_factory):
    """A quicker 2-ticker, 150-day panel for end-to-end unit tests."""
    path = tmp_path_factory.mktemp("data") / "small_panel.csv"
    synth_panel(seed=7, n_tickers=2, n_days=150, out=path)
    return path


@pytest.fixture(scope="session")
def small_panel(small_csv):
    return load_panel(small_csv)


@pytest.fixture(scope="session")
def separable_xy():
    """Linearly separable two-blob fixture, pre-standardized, 100 samples."""
    rng = np.random.default_rng(7)
    n = 50
    lows = rng.normal(-2.0, 0.5, size=(n, 2))
    highs = rng.normal(2.0, 0.5, size=(n, 2))
    X = np.vstack([lows, highs])
    y = np.array([0] * n + [1] * n)
    perm = rng.permutation(2 * n)
    _, X_std = standardize(X[perm])
    return X_std, y[perm]
