"""
Tests for the command line interface.
"""

import pytest
from click.testing import CliRunner

from src.experiment.cli import main
from src.experiment.config import load_config
from src.utils.errors import InferenceNotConvergedError


@pytest.fixture
def cli():
    return CliRunner()


@pytest.fixture
def invoke(cli, tiny_overrides):
    """Run the CLI against a tiny synthetic configuration in an output directory."""

    def run(output_dir, *args):
        options = ["--synthetic", "--output-dir", str(output_dir), "--log-level", "WARNING"]
        for override in tiny_overrides:
            options += ["--set", override]
        return cli.invoke(main, options + list(args))

    return run


def test_help(cli):
    result = cli.invoke(main, ["--help"])

    assert result.exit_code == 0
    for command in ("train-dict", "infer", "sensitivity", "spectrum", "pairs", "classify", "train-mlp"):
        assert command in result.output


def test_reports_are_reproducible(invoke, tmp_path):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        trained = invoke(out, "train-dict", "--lambda", "0.3")
        assert trained.exit_code == 0, trained.output
        assert "trained 144x100 dictionary" in trained.output

        measured = invoke(out, "sensitivity", "--representation", "pixels", "--representation", "sparse")
        assert measured.exit_code == 0, measured.output
        assert (out / "manifest-sensitivity.json").exists()
        assert not (out / ".lock").exists()
        outputs.append(out)

    reports = sorted(p.name for p in (outputs[0] / "reports").iterdir())
    assert "sensitivity_sparse_lam0.3.csv" in reports
    assert "objective_lam0.3.csv" in reports
    for name in reports:
        first = (outputs[0] / "reports" / name).read_bytes()
        second = (outputs[1] / "reports" / name).read_bytes()
        assert first == second, name


def test_infer_and_spectrum(invoke, tmp_path):
    assert invoke(tmp_path, "train-dict").exit_code == 0

    inferred = invoke(tmp_path, "infer", "--split", "validation", "--limit", "5")
    assert inferred.exit_code == 0, inferred.output
    assert "5 validation codes" in inferred.output

    spectrum = invoke(tmp_path, "spectrum")
    assert spectrum.exit_code == 0, spectrum.output
    assert "sigma_min=" in spectrum.output


def test_missing_checkpoint_exits_3(invoke, tmp_path):
    result = invoke(tmp_path, "spectrum", "--lambda", "0.3")

    assert result.exit_code == 3
    assert "Required artifact not found" in result.output


def test_invalid_config_exits_1(invoke, tmp_path):
    result = invoke(tmp_path, "--set", "k_grid=[]", "classify")

    assert result.exit_code == 1


def test_invalid_subcommand_value_exits_1(invoke, tmp_path):
    result = invoke(tmp_path, "sensitivity", "--std", "-1")

    assert result.exit_code == 1
    assert "Invalid configuration" in result.output


def test_locked_output_exits_3(invoke, tmp_path):
    tmp_path.mkdir(parents=True, exist_ok=True)
    (tmp_path / ".lock").write_text("123")

    result = invoke(tmp_path, "train-mlp")

    assert result.exit_code == 3
    assert "locked" in result.output


def test_all_lambdas(invoke, tmp_path, mocker):
    runner = mocker.MagicMock()
    runner.config = load_config(overrides=["lambdas=[0.1, 0.3, 0.9]"])
    mocker.patch("src.experiment.cli.ExperimentRunner", return_value=runner)

    result = invoke(tmp_path, "train-dict", "--all-lambdas")

    assert result.exit_code == 0, result.output
    assert [c.args[0] for c in runner.train_dictionary.call_args_list] == [0.1, 0.3, 0.9]
    runner.finish.assert_called_once_with("train-dict")


def test_nonconvergence_exits_2(invoke, tmp_path, mocker):
    runner = mocker.MagicMock()
    runner.config = load_config()
    runner.run_spectrum.side_effect = InferenceNotConvergedError(
        "1 of 1 images did not reach the fixed point",
        residuals=[{"index": 0, "inactive_excess": 0.5, "relative_residual": 0.01}],
    )
    mocker.patch("src.experiment.cli.ExperimentRunner", return_value=runner)

    result = invoke(tmp_path, "spectrum")

    assert result.exit_code == 2
    assert "index=0" in result.output
    runner.finish.assert_not_called()
