import json

import numpy as np
import pytest

from tauswitch.cli import (
    build_parser,
    main,
    parse_agent_value,
    parse_config_file,
    parse_tau_grid,
    synth_panel,
)
from tauswitch.data import load_panel


class TestSynth:
    def test_row_count(self, tmp_path):
        path = synth_panel(seed=1, n_tickers=2, n_days=20, out=tmp_path / "p.csv")
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 2 * 20

    def test_determinism(self, tmp_path):
        first = synth_panel(3, 3, 30, tmp_path / "a.csv")
        second = synth_panel(3, 3, 30, tmp_path / "b.csv")
        assert first.read_bytes() == second.read_bytes()

    def test_seed_changes_output(self, tmp_path):
        first = synth_panel(3, 3, 30, tmp_path / "a.csv")
        second = synth_panel(4, 3, 30, tmp_path / "b.csv")
        assert first.read_bytes() != second.read_bytes()

    def test_minimal_panel_round_trips(self, tmp_path):
        path = synth_panel(seed=5, n_tickers=1, n_days=2, out=tmp_path / "p.csv")
        panel = load_panel(path)
        assert panel.n_days == 2 and panel.n_tickers == 1

    def test_bar_invariants(self, tmp_path):
        import pandas as pd

        path = synth_panel(seed=9, n_tickers=3, n_days=60, out=tmp_path / "p.csv")
        frame = pd.read_csv(path)
        assert np.all(frame["close"] > 0)
        assert np.all(frame["high"] >= frame[["open", "close"]].max(axis=1))
        assert np.all(frame["low"] <= frame[["open", "close"]].min(axis=1))
        assert np.all(frame["volume"] >= 0)

    def test_cli_subcommand(self, tmp_path, capsys):
        out = tmp_path / "cli.csv"
        assert main(["synth", "--seed", "2", "--tickers", "1", "--days", "3", "--out", str(out)]) == 0
        assert out.exists()


class TestConfigFile:
    def test_parse_and_types(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# comment line\n"
            "data = panel.csv\n"
            "tau = 0.3   # inline comment\n"
            "group = 2\n"
            "turbulence_threshold = none\n"
        )
        settings = parse_config_file(path)
        assert settings == {
            "data": "panel.csv",
            "tau": 0.3,
            "group": 2,
            "turbulence_threshold": None,
        }

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("volatility = 3\n")
        with pytest.raises(ValueError, match="volatility"):
            parse_config_file(path)

    def test_agent_values(self, tmp_path):
        assert parse_agent_value("buy_and_hold").kind == "buy_and_hold"
        momentum = parse_agent_value("momentum:30")
        assert momentum.kind == "momentum" and momentum.lookback == 30
        replay_file = tmp_path / "r.csv"
        replay_file.write_text("date,ticker,shares\n")
        assert parse_agent_value(str(replay_file)).kind == "replay"

    def test_tau_grid_parsing(self, capsys):
        assert parse_tau_grid("0.0,0.25,0.5") == [0.0, 0.25, 0.5]
        assert parse_tau_grid("0.2,0.2,0.4") == [0.2, 0.4]
        assert "duplicate" in capsys.readouterr().err
        with pytest.raises(ValueError, match="tau grid"):
            parse_tau_grid("0.5,oops")
        with pytest.raises(ValueError, match="\\[0, 1\\]"):
            parse_tau_grid("0.5,1.5")


@pytest.fixture(scope="module")
def run_inputs(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_run")
    data = root / "panel.csv"
    synth_panel(seed=11, n_tickers=2, n_days=90, out=data)
    config = root / "run.cfg"
    config.write_text(
        f"data = {data}\n"
        "agent_a = buy_and_hold\n"
        "agent_b = momentum:21\n"
        "tau = 0.5\n"
        "group = 3\n"
        "iterations = 1\n"
        "seed = 4\n"
    )
    return root, config


class TestBacktestCommand:
    def test_success_writes_all_outputs(self, run_inputs, capsys):
        root, config = run_inputs
        out = root / "out_ok"
        code = main(["backtest", "--config", str(config), "--out", str(out)])
        captured = capsys.readouterr()
        assert code == 0
        for name in ("metrics.csv", "equity.csv", "decisions.csv", "config.json"):
            assert (out / name).exists()
        assert "strategy" in captured.out

    def test_invalid_tau_exits_nonzero_without_outputs(self, run_inputs, capsys):
        root, config = run_inputs
        out = root / "out_bad"
        code = main(
            ["backtest", "--config", str(config), "--tau", "1.5", "--out", str(out)]
        )
        captured = capsys.readouterr()
        assert code != 0
        assert "tau" in captured.err
        assert not out.exists()

    def test_flag_overrides_config_value(self, run_inputs):
        root, config = run_inputs
        out = root / "out_override"
        code = main(
            ["backtest", "--config", str(config), "--tau", "0.3", "--out", str(out)]
        )
        assert code == 0
        decisions = (out / "decisions.csv").read_text().splitlines()
        tau_column = decisions[0].split(",").index("tau")
        taus = {line.split(",")[tau_column] for line in decisions[1:]}
        assert taus == {"0.3"}
        echo = json.loads((out / "config.json").read_text())
        assert echo["tau"] == 0.3

    def test_missing_required_setting(self, run_inputs, capsys):
        root, _ = run_inputs
        code = main(["backtest", "--agent-a", "buy_and_hold", "--agent-b", "buy_and_hold",
                     "--out", str(root / "x")])
        captured = capsys.readouterr()
        assert code != 0
        assert "data" in captured.err


class TestSweepCommand:
    def test_grid_rows_and_determinism(self, run_inputs):
        root, config = run_inputs
        out_a = root / "sweep_a"
        out_b = root / "sweep_b"
        grid = "0.0,0.25,0.5,0.75,1.0"
        assert main(["sweep", "--config", str(config), "--tau-grid", grid, "--out", str(out_a)]) == 0
        assert main(["sweep", "--config", str(config), "--tau-grid", grid, "--out", str(out_b)]) == 0
        lines = (out_a / "sweep.csv").read_text().splitlines()
        assert len(lines) == 1 + 5
        assert (out_a / "sweep.csv").read_bytes() == (out_b / "sweep.csv").read_bytes()

    def test_duplicates_collapse_with_warning(self, run_inputs, capsys):
        root, config = run_inputs
        out = root / "sweep_dup"
        code = main(
            ["sweep", "--config", str(config), "--tau-grid", "0.5,0.5,1.0", "--out", str(out)]
        )
        captured = capsys.readouterr()
        assert code == 0
        assert "duplicate" in captured.err
        assert len((out / "sweep.csv").read_text().splitlines()) == 1 + 2

    def test_malformed_grid_exits_nonzero(self, run_inputs, capsys):
        root, config = run_inputs
        code = main(
            ["sweep", "--config", str(config), "--tau-grid", "a,b", "--out", str(root / "y")]
        )
        assert code != 0
        assert "tau grid" in capsys.readouterr().err


class TestHelp:
    def test_backtest_help_lists_flags_and_defaults(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            build_parser().parse_args(["backtest", "--help"])
        assert excinfo.value.code == 0
        text = capsys.readouterr().out
        for flag in ("--config", "--data", "--agent-a", "--agent-b", "--tau",
                     "--group", "--iterations", "--seed", "--out"):
            assert flag in text
        assert "default" in text

    def test_sweep_help_lists_grid_flag(self, capsys):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["sweep", "--help"])
        assert "--tau-grid" in capsys.readouterr().out
