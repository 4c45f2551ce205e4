"""Tests for the advlin command line."""
import json

import pytest

from advlin.cli import main as cli_main
from advlin.cli.deps import parse_eps_grid, parse_losses, parse_rational, resolve_seed
from advlin.cli.error_handler import EXIT_CHECKS_FAILED, EXIT_INVARIANT, EXIT_OK, EXIT_UNEXPECTED, EXIT_USAGE
from advlin.config import settings
from advlin.errors import InvariantViolation, UsageError
from advlin.utils.artifacts import read_csv


def _run(argv, out_dir):
    return cli_main.main([*argv, "--out", str(out_dir)])


def _error_line(capsys) -> dict:
    lines = [line for line in capsys.readouterr().err.splitlines() if line.strip()]
    return json.loads(lines[-1])


def test_bayes_command(out_dir, capsys):
    """Test a successful run prints the files it wrote and exits 0."""
    assert _run(["bayes", "--d", "3"], out_dir) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["subcommand"] == "bayes"
    assert summary["passed"] is True
    assert len(summary["files"]) == 2
    assert len(read_csv(out_dir / "bayes.csv")) == 3


def test_dynamics_command_example(out_dir):
    """Test the example triple given as exact fractions."""
    argv = ["dynamics", "--eta", "1/2", "--mu", "1", "--epsilon", "3/2", "--theta0", "1/1000000", "--horizon", "600"]
    assert _run(argv, out_dir) == EXIT_OK
    report = json.loads((out_dir / "dynamics_report.json").read_text())
    assert report["cycle"] == {"period": 6, "preperiod": 0}
    assert report["cycle_census"]["positive"] == 5
    assert report["cycle_census"]["negative"] == 1


def test_failed_check_exits_4(out_dir, capsys):
    """Test a failed verdict gives exit code 4 with the report still written."""
    argv = ["dynamics", "--theta0", "1000", "--horizon", "5", "--max-steps", "50"]
    assert _run(argv, out_dir) == EXIT_CHECKS_FAILED
    assert json.loads(capsys.readouterr().out)["passed"] is False
    assert (out_dir / "dynamics_report.json").exists()


@pytest.mark.parametrize("argv", [
    ["dynamics", "--eta", "abc"],
    ["dynamics", "--eta", "1/0"],
    ["dynamics", "--epsilon", "1", "2"],
    ["dynamics", "--eps-grid", "0:1:1"],
    ["dynamics", "--horizon", "0"],
    ["intercept", "--mu1", "1", "--mu2", "2"],
    ["intercept", "--epsilon", "1"],
    ["intercept", "--mu", "1"],
    ["sign-counts", "--epsilon", "25"],
    ["sign-counts", "--eps-grid", "0:30:10"],
    ["sign-counts", "--loss", "squared"],
    ["bayes", "--mu", "-1"],
    ["bayes", "--jobs", "0"],
    ["bayes", "--seed", "-3"],
])
def test_usage_errors_exit_2(out_dir, capsys, argv):
    """Test malformed or out-of-range arguments give exit code 2 and one JSON error line."""
    assert _run(argv, out_dir) == EXIT_USAGE
    error = _error_line(capsys)
    assert error["error"] == "usage_error"
    assert error["message"]
    assert error["run_id"]


@pytest.mark.parametrize("argv", [
    ["no-such-command"],
    ["sign-counts", "--epsilon", "1", "--eps-grid", "0:1:1"],
    ["train-100d", "--preset", "extreme"],
])
def test_argparse_errors_exit_2(out_dir, argv):
    """Test argument-parser errors also exit with 2."""
    with pytest.raises(SystemExit) as exc_info:
        _run(argv, out_dir)
    assert exc_info.value.code == 2


def test_invariant_violation_exits_3(out_dir, capsys, monkeypatch):
    """Test a failed update cross-check gives exit code 3."""
    def broken(spec):
        raise InvariantViolation("update mismatch")

    monkeypatch.setattr(cli_main, "run_experiment", broken)
    assert _run(["bayes"], out_dir) == EXIT_INVARIANT
    assert _error_line(capsys)["error"] == "invariant_violation"


def test_unexpected_error_exits_1(out_dir, capsys, monkeypatch):
    """Test anything else gives exit code 1 without leaking the message."""
    def broken(spec):
        raise RuntimeError("secret detail")

    monkeypatch.setattr(cli_main, "run_experiment", broken)
    assert _run(["bayes"], out_dir) == EXIT_UNEXPECTED
    error = _error_line(capsys)
    assert error["error"] == "internal_error"
    assert "secret" not in error["message"]


def test_sign_counts_command_is_reproducible(tmp_path):
    """Test two runs with the same seed write byte-identical CSVs."""
    argv = ["sign-counts", "--loss", "linear", "--epsilon", "0", "2", "--iters", "200", "--n-test", "100", "--seed", "3"]
    assert _run(argv, tmp_path / "a") == EXIT_OK
    assert _run(argv, tmp_path / "b") == EXIT_OK
    first = (tmp_path / "a" / "sign_counts.csv").read_bytes()
    assert first == (tmp_path / "b" / "sign_counts.csv").read_bytes()
    assert {row["seed"] for row in read_csv(tmp_path / "a" / "sign_counts.csv")} == {"3"}


def test_seed_falls_back_to_environment(out_dir, monkeypatch):
    """Test ADVLIN_SEED is used when --seed is absent."""
    monkeypatch.setattr(settings, "ADVLIN_SEED", 9)
    argv = ["sign-counts", "--loss", "linear", "--epsilon", "1", "--iters", "50", "--n-test", "10", "--manifest"]
    assert _run(argv, out_dir) == EXIT_OK
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["params"]["seed"] == 9
    assert resolve_seed(None) == 9
    assert resolve_seed("4") == 4


def test_train_100d_command(out_dir):
    """Test a small epoch sweep through the command line."""
    argv = [
        "train-100d", "--loss", "hinge1", "--epsilon", "1.5", "--d", "3",
        "--n-train", "20", "--n-test", "20", "--epochs", "2",
    ]
    assert _run(argv, out_dir) == EXIT_OK
    assert len(read_csv(out_dir / "train_100d_hinge1_eps_1.5.csv")) == 2


def test_intercept_command(out_dir):
    """Test the intercept subcommand writes both loss histories."""
    assert _run(["intercept", "--steps", "20", "--n-train", "100"], out_dir) == EXIT_OK
    assert len(read_csv(out_dir / "intercept_linear.csv")) == 21
    assert len(read_csv(out_dir / "intercept_hinge0.csv")) == 21


def test_version(capsys):
    """Test --version prints the package version."""
    with pytest.raises(SystemExit) as exc_info:
        cli_main.main(["--version"])
    assert exc_info.value.code == 0
    assert "advlin" in capsys.readouterr().out


def test_parse_eps_grid():
    """Test inclusive, exact grids and malformed input."""
    assert len(parse_eps_grid("0:20:0.5")) == 41
    assert parse_eps_grid("0:20:2") == [float(v) for v in range(0, 21, 2)]
    assert parse_eps_grid("0:1:0.3") == [0.0, 0.3, 0.6, 0.9]
    assert parse_eps_grid("1/2:1/2:1") == [0.5]
    for bad in ("0:1", "0:1:0", "1:0:1", "a:b:c"):
        with pytest.raises(UsageError):
            parse_eps_grid(bad)


def test_parse_helpers():
    """Test exact rationals and canonical loss tokens."""
    assert parse_rational("3/2") * 2 == 3
    assert parse_rational("0.001") * 1000 == 1
    assert parse_losses(["xent", "Hinge0"]) == ["xent", "hinge0"]
    with pytest.raises(UsageError):
        parse_losses(["squared"])
