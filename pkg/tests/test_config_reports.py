"""
Tests for configuration loading, report files, manifests, the output lock
and array artifacts.
"""

import json
from pathlib import Path

import numpy as np
import pytest
import yaml

from src.experiment import (
    ExperimentConfig,
    ExperimentLock,
    emit_report,
    load_config,
    parse_overrides,
    read_csv_report,
    save_config,
    write_manifest,
)
from src.utils.artifacts import load_arrays, save_arrays
from src.utils.errors import (
    ConfigError,
    ExperimentLockedError,
    MissingArtifactError,
    StaleArtifactError,
)


class TestConfig:
    def test_defaults(self):
        config = load_config()

        assert config.lam == 0.3
        assert config.k_grid == [1, 3, 10, 30, 100, 300, 1000, 3000]
        assert config.iterations_for(0.3) == 5000

    def test_file_then_overrides_then_flags(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text(yaml.safe_dump({"lam": 0.1, "seed": 4, "n_atoms": 50}))

        config = load_config(str(path), overrides=["seed=5", "k_grid=[1, 2]"], n_atoms=60)

        assert (config.lam, config.seed, config.n_atoms, config.k_grid) == (0.1, 5, 60, [1, 2])

    def test_invalid_values(self):
        with pytest.raises(ConfigError):
            load_config(overrides=["k_grid=[]"])
        with pytest.raises(ConfigError):
            load_config(overrides=["n_atoms=0"])
        with pytest.raises(ConfigError):
            load_config(overrides=["metrics=[manhattan]"])
        with pytest.raises(ConfigError):
            load_config(overrides=["lam=-1"])

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            load_config(overrides=["learning_rate=0.1"])

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "absent.yaml"))
        bad = tmp_path / "list.yaml"
        bad.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError, match="mapping"):
            load_config(str(bad))

    def test_parse_overrides(self):
        assert parse_overrides(["lam=0.1", "metrics=[cosine]", "train-images=10"]) == {
            "lam": 0.1,
            "metrics": ["cosine"],
            "train_images": 10,
        }
        with pytest.raises(ConfigError):
            parse_overrides(["lam"])

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("SPARSE_SENSITIVITY_SEED", "11")

        assert load_config().seed == 11
        assert load_config(seed=3).seed == 3

    def test_hash_ignores_paths(self, tmp_path):
        a = load_config(output_dir=tmp_path / "a")
        b = load_config(output_dir=tmp_path / "b", data_dir=tmp_path)

        assert a.config_hash() == b.config_hash()
        assert a.config_hash() != load_config(seed=1).config_hash()

    def test_stage_hash(self):
        config = load_config()

        assert config.stage_hash("dictionary", 0.1) != config.stage_hash("dictionary", 0.3)
        assert config.stage_hash("dictionary") == config.stage_hash("dictionary", 0.3)
        assert config.stage_hash("mlp") == config.updated(k_grid=[1]).stage_hash("mlp")
        assert config.stage_hash("codes") != config.updated(infer_chunk=7).stage_hash("codes")
        with pytest.raises(ConfigError):
            config.stage_hash("features")

    def test_updated(self):
        config = load_config()

        assert config.updated(sensitivity_samples=None) is config
        assert config.updated(sensitivity_samples=5).sensitivity_samples == 5
        with pytest.raises(ConfigError):
            config.updated(sensitivity_samples=0)

    def test_save_and_reload(self, tmp_path):
        config = load_config(overrides=["lam=0.9", "mlp_schedule=[[10, 0.5]]"])
        path = save_config(config, tmp_path / "saved.yaml")

        reloaded = load_config(str(path))

        assert reloaded.config_hash() == config.config_hash()
        assert isinstance(reloaded, ExperimentConfig)


class TestReports:
    def test_csv(self, tmp_path):
        rows = [{"index": 0, "sigma": 0.1, "generic": True}, {"index": 1, "sigma": None, "generic": False}]
        path = emit_report(rows, tmp_path / "r.csv", provenance={"seed": 0, "config_hash": "abc"})

        lines = path.read_text().splitlines()
        assert lines[:3] == ["# config_hash=abc", "# seed=0", "index,sigma,generic"]
        assert lines[3] == "0,0.10000000000000001,true"
        assert lines[4] == "1,,false"

        report = read_csv_report(path)
        assert report["provenance"] == {"config_hash": "abc", "seed": "0"}
        assert report["rows"][0]["sigma"] == "0.10000000000000001"

    def test_csv_columns(self, tmp_path):
        path = emit_report([{"a": 1, "b": 2}], tmp_path / "r.csv", columns=["b"])

        assert path.read_text() == "b\n2\n"

    def test_empty_csv_needs_columns(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report([], tmp_path / "r.csv")
        assert emit_report([], tmp_path / "r.csv", columns=["k"]).read_text() == "k\n"

    def test_json(self, tmp_path):
        results = {"sigma": np.array([0.5, 1.0]), "k": np.int64(3), "generic": np.bool_(True)}
        path = emit_report(results, tmp_path / "r.json", format="json", provenance={"seed": 1})

        document = json.loads(path.read_text())
        assert document == {"provenance": {"seed": 1}, "results": {"sigma": [0.5, 1.0], "k": 3, "generic": True}}

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report([], tmp_path / "r.xml", format="xml")

    def test_manifest(self, tmp_path):
        artifact = tmp_path / "reports" / "x.csv"
        path = write_manifest(tmp_path, "spectrum", "abc", {"seed": 0}, [artifact])

        manifest = json.loads(path.read_text())
        assert path.name == "manifest-spectrum.json"
        assert manifest["artifacts"] == [str(Path("reports") / "x.csv")]
        assert manifest["config_hash"] == "abc"
        assert "numpy" in manifest["versions"]


class TestLock:
    def test_lock_is_exclusive(self, tmp_path):
        with ExperimentLock(tmp_path):
            assert (tmp_path / ".lock").exists()
            with pytest.raises(ExperimentLockedError):
                with ExperimentLock(tmp_path):
                    pass
        assert not (tmp_path / ".lock").exists()

    def test_lock_released_on_error(self, tmp_path):
        with pytest.raises(RuntimeError):
            with ExperimentLock(tmp_path):
                raise RuntimeError("boom")
        assert not (tmp_path / ".lock").exists()


class TestArtifacts:
    def test_roundtrip_with_hash(self, tmp_path):
        path = save_arrays(tmp_path / "a.npz", {"kind": "test", "stage_hash": "h1"}, x=np.arange(3))

        header, arrays = load_arrays(path, expected_hash="h1")

        assert header["kind"] == "test"
        np.testing.assert_array_equal(arrays["x"], np.arange(3))
        assert not (tmp_path / "a.npz.tmp").exists()

    def test_stale_and_missing(self, tmp_path):
        path = save_arrays(tmp_path / "a.npz", {"kind": "test", "stage_hash": "h1"}, x=np.zeros(1))

        with pytest.raises(StaleArtifactError):
            load_arrays(path, expected_hash="h2")
        with pytest.raises(MissingArtifactError):
            load_arrays(tmp_path / "b.npz")
