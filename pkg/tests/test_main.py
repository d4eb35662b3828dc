"""Tests for main module."""

import json
from unittest.mock import Mock, patch

import pytest

from src.main import (
    EXIT_DEGENERATE,
    EXIT_REPRODUCTION_FAILED,
    EXIT_USAGE,
    build_parser,
    load_run_config,
    main,
    setup_logging,
)
from src.models.reproduction import ReproductionReport, ReproductionRow, RowStatus
from src.utils.config import Settings

QUOTED_POINT = ["--tau0", "0.52", "--tau1", "0.54", "--theta", "3.14159"]


@pytest.fixture(autouse=True)
def isolated_settings():
    """Run every command with defaults, ignoring the environment."""
    with patch("src.main.get_settings", return_value=Settings(_env_file=None)):
        yield


def run(argv: list[str]) -> int:
    try:
        main(argv)
    except SystemExit as e:
        return int(e.code or 0)
    return 0


class TestSetupLogging:
    """Test logging setup."""

    @patch("src.main.configure_logging")
    def test_setup_logging(self, mock_configure):
        """Test that logging is configured from settings."""
        mock_settings = Mock()
        mock_settings.log_level = "INFO"
        mock_settings.log_json = True

        setup_logging(mock_settings)

        mock_configure.assert_called_once_with("INFO", json_format=True)

    @patch("src.main.configure_logging")
    def test_flag_overrides_level(self, mock_configure):
        """Test --log-level wins over the configured level."""
        mock_settings = Mock()
        mock_settings.log_level = "INFO"
        mock_settings.log_json = False

        setup_logging(mock_settings, "DEBUG")

        mock_configure.assert_called_once_with("DEBUG", json_format=False)


class TestSmatrixCommand:
    """Test the smatrix subcommand."""

    def test_json_output(self, capsys):
        """Test the matrix and residual are printed as JSON."""
        assert run(["smatrix", *QUOTED_POINT]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["smatrix"]["entries"]) == 3
        assert payload["unitarity_residual"] < 1e-10

    def test_csv_output(self, capsys):
        """Test one CSV row per matrix entry."""
        assert run(["smatrix", *QUOTED_POINT, "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "row,col,re,im"
        assert len(lines) == 10

    def test_degenerate_exit_code(self, capsys):
        """Test degenerate parameters exit with code 3."""
        code = run(["smatrix", "--tau0", "1", "--tau1", "1", "--theta", "0"])
        assert code == EXIT_DEGENERATE
        assert "noonforge:" in capsys.readouterr().err

    def test_missing_parameter(self, capsys):
        """Test a missing parameter is a usage error."""
        assert run(["smatrix", "--tau0", "0.5", "--theta", "1"]) == EXIT_USAGE
        assert "tau1" in capsys.readouterr().err

    def test_out_of_range_parameter(self):
        """Test an invalid transmission is a usage error."""
        assert run(["smatrix", "--tau0", "1.5", "--tau1", "0.5", "--theta", "1"]) == 2

    def test_writes_file(self, tmp_path, capsys):
        """Test --out writes the artifact instead of stdout."""
        target = tmp_path / "s.json"
        assert run(["smatrix", *QUOTED_POINT, "--out", str(target)]) == 0
        assert capsys.readouterr().out == ""
        assert "smatrix" in json.loads(target.read_text())


class TestHeraldCommand:
    """Test the herald subcommand."""

    def test_report(self, capsys):
        """Test the analytic three-photon optimum."""
        argv = ["herald", "--input", "1,2,1", "--herald", "1"]
        argv += ["--tau0", str(1 / 3**0.5), "--tau1", "0.5", "--theta", "3.141592653589793"]
        assert run(argv) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["p_click"] == pytest.approx(8 / 27, abs=1e-9)
        assert payload["f_noon"] == pytest.approx(1.0, abs=1e-9)
        assert payload["n_target"] == 3

    def test_params_file(self, tmp_path, capsys):
        """Test device parameters can come from a file."""
        params = tmp_path / "params.json"
        params.write_text(json.dumps({"tau0": 0.5, "tau1": 0.5, "theta": 1.0}))
        argv = ["herald", "--params", str(params), "--input", "1,1,1", "--herald", "0"]
        assert run(argv) == 0
        assert json.loads(capsys.readouterr().out)["params"]["theta2"] == 1.0

    def test_vacuum_input(self, capsys):
        """Test the vacuum heralds with certainty."""
        argv = ["herald", *QUOTED_POINT, "--input", "0,0,0", "--herald", "0"]
        assert run(argv) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["p_click"] == 1.0
        assert payload["f_noon"] == 1.0

    def test_herald_exceeds_photons(self):
        """Test asking for more clicks than photons is a usage error."""
        argv = ["herald", *QUOTED_POINT, "--input", "1,1,1", "--herald", "4"]
        assert run(argv) == EXIT_USAGE

    def test_config_unknown_key(self, tmp_path):
        """Test an unknown config key is a usage error."""
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"input": [1, 1, 1], "heraldd": 0}))
        assert run(["herald", *QUOTED_POINT, "--config", str(config)]) == EXIT_USAGE

    def test_bad_occupations(self):
        """Test malformed --input is rejected by the parser."""
        assert run(["herald", *QUOTED_POINT, "--input", "1,x", "--herald", "0"]) == 2


class TestEvolveCommand:
    """Test the evolve subcommand."""

    def test_csv(self, capsys):
        """Test one row per output basis state."""
        argv = ["evolve", *QUOTED_POINT, "--input", "1,1,1", "--format", "csv"]
        assert run(argv) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n_a,n_b,n_c,re,im"
        assert len(lines) == 11


class TestOptimizeCommand:
    """Test manifold sampling options of the optimize subcommand."""

    def optimize_with(self, extra: list[str]) -> Mock:
        result = Mock()
        result.model_dump.return_value = {}
        sample = Mock()
        sample.model_dump.return_value = {"members": []}
        argv = ["optimize", "--input", "1,2,1", "--herald", "1", *extra]
        with (
            patch("src.main.optimize", return_value=result),
            patch("src.main.explore_manifold", return_value=sample) as mock_explore,
        ):
            assert run(argv) == 0
        return mock_explore

    def test_manifold_uses_settings_default(self, capsys):
        """Test --manifold samples as many points as the settings ask for."""
        mock_explore = self.optimize_with(["--manifold"])
        assert mock_explore.call_args[0][1] == Settings(_env_file=None).manifold_samples
        assert json.loads(capsys.readouterr().out)["manifold"] == {"members": []}

    def test_explicit_sample_count_wins(self):
        """Test --manifold-samples overrides the settings default."""
        mock_explore = self.optimize_with(["--manifold", "--manifold-samples", "3"])
        assert mock_explore.call_args[0][1] == 3

    def test_no_manifold_by_default(self):
        """Test plain optimize runs skip manifold sampling."""
        assert not self.optimize_with([]).called


class TestSweepCommand:
    """Test the sweep subcommand."""

    def test_csv_and_pareto(self, tmp_path, capsys):
        """Test the sweep table streams to stdout and the front to a file."""
        pareto = tmp_path / "front.csv"
        argv = [
            "sweep",
            "--input",
            "1,2,1",
            "--herald",
            "1",
            "--grid-tau0",
            "0.2,0.8,3",
            "--grid-tau1",
            "0.5,0.5,1",
            "--grid-theta",
            "0,6.283185307179586,5",
            "--pareto",
            str(pareto),
        ]
        assert run(argv) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "tau0,tau1,theta1,theta2,p_click,f_noon"
        assert len(lines) == 16
        assert pareto.read_text().startswith("tau0,")

    def test_deterministic(self, capsys):
        """Test repeated sweeps are byte-identical."""
        argv = ["sweep", "--input", "1,1,1", "--herald", "0", "--grid-tau0", "0.1,0.9,3"]
        argv += ["--grid-tau1", "0.5,0.5,1", "--grid-theta", "1,2,2"]
        assert run(argv) == 0
        first = capsys.readouterr().out
        assert run(argv) == 0
        assert capsys.readouterr().out == first

    def test_bad_axis(self):
        """Test a malformed axis is a usage error."""
        assert run(["sweep", "--input", "1,1,1", "--herald", "0", "--grid-tau0", "0,1"]) == 2


class TestReproduceCommand:
    """Test the reproduce subcommand."""

    def make_report(self, status: RowStatus) -> ReproductionReport:
        row = ReproductionRow(n=2, label="ref", p_click=1.0, f_noon=1.0, status=status)
        return ReproductionReport(name="fig2", rows=[row])

    @patch("src.main.reproduce_fig2")
    def test_pass(self, mock_reproduce, tmp_path, capsys):
        """Test a passing reproduction writes both tables and exits 0."""
        mock_reproduce.return_value = self.make_report(RowStatus.PASS)
        assert run(["reproduce", "fig2", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "fig2.csv").read_text().startswith("N,p_click,f_noon")
        assert (tmp_path / "fig2_pareto.csv").exists()
        assert "overall: PASS" in capsys.readouterr().out
        mock_reproduce.assert_called_once()

    @patch("src.main.reproduce_fig2")
    def test_fail(self, mock_reproduce, tmp_path):
        """Test a failing reproduction exits with code 1."""
        mock_reproduce.return_value = self.make_report(RowStatus.FAIL)
        assert run(["reproduce", "fig2", "--out", str(tmp_path)]) == EXIT_REPRODUCTION_FAILED

    def test_unknown_figure(self):
        """Test only stored figures can be reproduced."""
        assert run(["reproduce", "fig9"]) == EXIT_USAGE


class TestLoadRunConfig:
    """Test flag and file merging."""

    def test_flags(self):
        """Test parsed flags land in the run config."""
        args = build_parser().parse_args(
            ["optimize", "--input", "1,2,1", "--herald", "1", "--initial-guess", "0.5,0.5,3"]
        )
        config = load_run_config(args)
        assert config.input == [1, 2, 1]
        assert config.initial_guess.to_params().theta1 == 3.0
        assert config.untied is False
