"""
Tests for the experiment runner on tiny synthetic configurations.
"""

import json

import numpy as np
import pytest

from src.coding import DictionaryTrainer, load_checkpoint
from src.coding.types import GENERIC_MARGIN, Precision
from src.experiment import ExperimentRunner, read_csv_report
from src.experiment.core import lam_tag
from src.perturbations import PerturbationKind
from src.representations import sparse_code
from src.utils.errors import ConfigError, MissingArtifactError, StaleArtifactError

LAM = 0.3


@pytest.fixture
def runner(tiny_config):
    return ExperimentRunner(tiny_config)


@pytest.fixture
def trained(runner):
    runner.train_dictionary(LAM)
    return runner


def test_lam_tag():
    assert lam_tag(0.3) == "lam0.3"
    assert lam_tag(3.0) == "lam3"


class TestData:
    def test_synthetic_split(self, runner):
        train, validation = runner.load_data()

        assert (len(train), len(validation)) == (150, 50)
        assert train.dim == 144

    def test_train_images_truncates(self, tiny_config):
        train, _ = ExperimentRunner(tiny_config.updated(train_images=30)).load_data()

        assert len(train) == 30

    def test_real_data_needs_a_directory(self, tiny_config):
        with pytest.raises(ConfigError, match="data directory"):
            ExperimentRunner(tiny_config.updated(synthetic=False)).load_data()


class TestDictionary:
    def test_outputs(self, trained):
        output = trained.output_dir
        checkpoint = load_checkpoint(trained.dictionary_path(LAM))

        assert checkpoint.iteration == 20
        assert checkpoint.dictionary.atoms.shape == (144, 100)
        assert not trained.state_path(LAM).exists()

        curve = read_csv_report(output / "reports" / "objective_lam0.3.csv")
        assert len(curve["rows"]) == 21
        assert curve["provenance"]["config_hash"] == trained.config.config_hash()

        summary = json.loads((output / "reports" / "dictionary_lam0.3.json").read_text())["results"]
        assert summary["iterations"] == 20
        assert summary["max_pairwise_overlap"] < 1.0

    def test_resume_matches_uninterrupted_run(self, tiny_config, tmp_path):
        full = ExperimentRunner(tiny_config.updated(output_dir=tmp_path / "full")).train_dictionary(LAM)

        resumed_runner = ExperimentRunner(tiny_config.updated(output_dir=tmp_path / "resumed"))
        train, _ = resumed_runner.load_data()
        config = resumed_runner.config
        partial = DictionaryTrainer(train.pixels, lam=LAM, n_atoms=config.n_atoms, seed=config.seed)
        partial.run(10)
        partial.save_state(resumed_runner.state_path(LAM), stage_hash=config.stage_hash("dictionary", LAM))

        resumed = resumed_runner.train_dictionary(LAM)

        np.testing.assert_array_equal(resumed.atoms, full.atoms)

    def test_stale_checkpoint(self, trained):
        other = ExperimentRunner(trained.config.updated(n_atoms=90))

        with pytest.raises(StaleArtifactError):
            other.load_dictionary(LAM)

    def test_missing_checkpoint(self, runner):
        with pytest.raises(MissingArtifactError):
            runner.load_dictionary(0.9)


class TestInference:
    def test_run_infer(self, trained):
        summary = trained.run_infer(LAM, "validation", limit=20)

        assert summary["images"] == 20
        assert 0.0 < summary["mean_active_fraction"] < 1.0
        rows = read_csv_report(trained.output_dir / "reports" / "codes_lam0.3_validation.csv")["rows"]
        assert len(rows) == 20
        assert sorted(p.name for p in trained.codes_dir(LAM).iterdir()) == ["validation_0000000.npz"]

    def test_cached_chunks_are_reused(self, trained, mocker):
        codes, margins = trained.infer_codes(LAM, "train", limit=70)
        spy = mocker.patch("src.experiment.core.infer_batch")

        again, _ = ExperimentRunner(trained.config).infer_codes(LAM, "train", limit=70)
        shorter, _ = ExperimentRunner(trained.config).infer_codes(LAM, "train", limit=10)

        spy.assert_not_called()
        np.testing.assert_array_equal(again, codes)
        np.testing.assert_array_equal(shorter, codes[:10])
        assert codes.shape == (70, 100)
        assert margins.shape == (70,)


def test_sensitivity_reports(trained):
    histogram = trained.run_sensitivity("pixels")
    reports = trained.output_dir / "reports"

    assert histogram.median(PerturbationKind.NOISE) == pytest.approx(1.0)
    assert histogram.count(PerturbationKind.DISTORTION) == 6
    assert len(read_csv_report(reports / "sensitivity_pixels.csv")["rows"]) == 18
    bins = read_csv_report(reports / "sensitivity_pixels_bins.csv")["rows"]
    assert len(bins) == 100
    assert sum(int(row["count_noise"]) for row in bins) == 6


def test_sparse_sensitivity(trained):
    histogram = trained.run_sensitivity("sparse", LAM)

    assert (trained.output_dir / "reports" / "sensitivity_sparse_lam0.3.json").exists()
    assert histogram.summary()["requested"] == 6


def test_sparse_representation_uses_configured_precision(tiny_config, mocker):
    runner = ExperimentRunner(tiny_config.updated(precision="double"))
    runner.train_dictionary(LAM)
    spy = mocker.spy(sparse_code, "infer_batch")

    rep = runner.representation("sparse", LAM)
    rep.encode(runner.load_data()[0].pixels[:2])

    assert rep.precision is Precision.DOUBLE
    assert spy.call_args.kwargs["precision"] is Precision.DOUBLE


def test_spectrum(trained):
    summary = trained.run_spectrum(LAM)

    assert summary["k"] >= 1
    assert summary["max_gain"] >= summary["min_gain"] > 0
    assert summary["sigma_min"] == pytest.approx(1.0 / summary["max_gain"])
    rows = read_csv_report(trained.output_dir / "reports" / "spectrum_lam0.3.csv")["rows"]
    assert len(rows) == 144
    assert rows[-1]["sigma"] == ""


def test_spectrum_averages_over_generic_images(trained):
    summary = trained.run_spectrum(LAM)
    R, margins = trained.infer_codes(LAM, "train", 10)
    generic = [t for t in range(R.shape[0]) if margins[t] >= GENERIC_MARGIN and np.any(R[t])]

    assert summary["images"] == len(generic)
    assert summary["image"] == generic[0]
    rows = read_csv_report(trained.output_dir / "reports" / "spectrum_lam0.3.csv")["rows"]
    for kind in PerturbationKind:
        power = sum(float(row[f"amplitude_{kind.value}"]) ** 2 for row in rows)
        assert power == pytest.approx(1.0, abs=1e-9)
    gains = [float(row["gain"]) for row in rows]
    assert gains[0] == pytest.approx(
        np.mean([1.0 / np.linalg.svd(trained.load_dictionary(LAM).atoms[:, np.flatnonzero(R[t])],
                                     compute_uv=False).min() for t in generic])
    )


def test_pairs(trained):
    summary = trained.run_pairs(LAM)

    assert summary["pairs"] == 10
    assert summary["active_overlap_image"] is not None
    assert 0.0 < summary["max_pairwise_overlap"] < 1.0


def test_classify(trained):
    runner = ExperimentRunner(trained.config.updated(metrics=["euclidean"]))

    summary = runner.run_classify(LAM, ["pixels", "random"])

    assert set(summary) == {"pixels", "random"}
    assert set(summary["pixels"]) == {"knn:euclidean:none", "logreg:softmax:test", "logreg:softmax:validation"}
    assert set(summary["pixels"]["knn:euclidean:none"]) == {"1", "2"}


def test_mlp_is_trained_once(runner, mocker):
    mlp = runner.ensure_mlp()
    spy = mocker.spy(ExperimentRunner, "_emit")

    loaded = ExperimentRunner(runner.config).ensure_mlp()

    np.testing.assert_array_equal(loaded.W1, mlp.W1)
    spy.assert_not_called()
    assert (runner.output_dir / "reports" / "mlp_training.csv").exists()


def test_finish_writes_manifest(trained):
    manifest = json.loads(trained.finish("train-dict").read_text())

    assert manifest["command"] == "train-dict"
    assert "dictionaries/dictionary_lam0.3.npz" in manifest["artifacts"]
    assert "config.yaml" in manifest["artifacts"]
