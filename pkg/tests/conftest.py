"""
Shared fixtures: small synthetic image sets and random dictionaries.
"""

import numpy as np
import pytest

from src.coding import Dictionary
from src.data import split_train_val, synthetic_digits
from src.experiment.config import load_config

SIDE = 12


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale runs on real MNIST")


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    for name in ("SPARSE_SENSITIVITY_DATA_DIR", "SPARSE_SENSITIVITY_SEED", "SPARSE_SENSITIVITY_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture(scope="session")
def digits():
    """200 synthetic 12x12 digits, 20 per class."""
    return synthetic_digits(200, side=SIDE, seed=0)


@pytest.fixture(scope="session")
def splits(digits):
    return split_train_val(digits, 150)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_dictionary():
    """Overcomplete 8 x 12 dictionary with unit-norm Gaussian columns."""
    atoms = np.random.default_rng(0).standard_normal((8, 12))
    return Dictionary.from_matrix(atoms, lam=0.3)


@pytest.fixture(scope="session")
def image_dictionary():
    """Dictionary for 12x12 images: 100 nonnegative-biased random filters."""
    atoms = np.random.default_rng(3).standard_normal((SIDE * SIDE, 100)) + 0.2
    return Dictionary.from_matrix(atoms, lam=0.3)


TINY_OVERRIDES = [
    "synthetic_count=200",
    "synthetic_side=12",
    "n_train=150",
    "n_atoms=100",
    "dict_iterations=20",
    "checkpoint_every=10",
    "infer_check_every=50",
    "infer_chunk=64",
    "sensitivity_samples=6",
    "spectrum_images=10",
    "spectrum_directions=20",
    "rip_trials=20",
    "eval_images=40",
    "k_grid=[1,2]",
    "eval_seeds=[0]",
    "lam_w_grid=[0.01]",
    "logreg_steps=50",
    "mlp_hidden=16",
    "mlp_schedule=[[20,0.1]]",
    "mlp_batch_size=16",
    "random_width=32",
]


@pytest.fixture
def tiny_overrides():
    """Overrides small enough to run every stage in seconds."""
    return list(TINY_OVERRIDES)


@pytest.fixture
def tiny_config(tmp_path, tiny_overrides):
    return load_config(synthetic=True, output_dir=str(tmp_path / "results"), overrides=tiny_overrides)
