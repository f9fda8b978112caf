"""
Experiment configuration.

A configuration is a flat YAML mapping of result-affecting settings. Values
can be overridden by ``SPARSE_SENSITIVITY_*`` environment variables and by
``key=value`` pairs from the command line, in increasing order of priority.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import yaml
from pydantic import ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.coding.training import default_iterations
from src.coding.types import Precision
from src.utils.errors import ConfigError
from src.utils.helpers import stable_hash

logger = logging.getLogger(__name__)

ENV_PREFIX = "SPARSE_SENSITIVITY_"

# Fields every artifact depends on, then the extra fields of each stage.
_DATA_FIELDS = ("synthetic", "synthetic_count", "synthetic_side", "n_train", "train_images", "seed")
_STAGE_FIELDS: Dict[str, Tuple[str, ...]] = {
    "data": (),
    "dictionary": ("n_atoms", "dict_iterations", "precision"),
    "codes": ("n_atoms", "dict_iterations", "precision", "infer_max_iters", "infer_check_every", "infer_chunk"),
    "mlp": ("mlp_hidden", "mlp_schedule", "mlp_batch_size"),
    "random_net": ("random_width",),
}
_UNHASHED_FIELDS = {"data_dir", "output_dir"}


class ExperimentConfig(BaseSettings):
    """
    Settings of a full experiment.

    Usage:
        config = load_config("config/desk_scale.yaml", overrides=["lam=0.1"])
        config.config_hash()
    """

    model_config = SettingsConfigDict(env_prefix=ENV_PREFIX, extra="forbid")

    # Data
    data_dir: Optional[Path] = None
    output_dir: Path = Path("results")
    synthetic: bool = False
    synthetic_count: int = 2000
    synthetic_side: int = 28
    n_train: int = 50_000
    train_images: Optional[int] = None
    eval_images: Optional[int] = None
    seed: int = 0

    # Dictionary learning and inference
    lambdas: List[float] = [0.03, 0.10, 0.30, 0.90, 3.0]
    lam: float = 0.3
    n_atoms: int = 784
    dict_iterations: Optional[int] = None
    checkpoint_every: int = 500
    precision: Precision = Precision.SINGLE
    infer_max_iters: int = 1_000_000
    infer_check_every: int = 10_000
    infer_chunk: int = 500

    # Sensitivity and spectra
    sensitivity_samples: int = 4000
    distortion_grid: int = 5
    distortion_std: float = 0.25
    spectrum_images: int = 100
    spectrum_directions: int = 4000
    rip_trials: int = 1000
    pair_threshold: float = 0.0
    pair_top: int = 10

    # Classifiers
    representations: List[str] = ["pixels", "sparse", "mlp", "random"]
    k_grid: List[int] = [1, 3, 10, 30, 100, 300, 1000, 3000]
    lam_w_grid: List[float] = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0]
    eval_seeds: List[int] = [0, 1, 2, 3, 4]
    metrics: List[str] = ["euclidean", "cosine"]
    logreg_steps: int = 50_000
    mlp_hidden: int = 784
    mlp_schedule: List[Tuple[int, float]] = [(1000, 0.1), (1000, 0.01)]
    mlp_batch_size: int = 64
    random_width: int = 7840

    @field_validator("lambdas", "k_grid", "lam_w_grid", "eval_seeds", "metrics", "representations", "mlp_schedule")
    @classmethod
    def _non_empty(cls, value: list, info) -> list:
        if not value:
            raise ValueError(f"{info.field_name} must not be empty")
        return value

    @field_validator(
        "n_atoms", "checkpoint_every", "infer_max_iters", "infer_check_every", "infer_chunk",
        "sensitivity_samples", "distortion_grid", "spectrum_images", "spectrum_directions",
        "rip_trials", "pair_top", "logreg_steps", "mlp_hidden", "mlp_batch_size", "random_width",
        "synthetic_count",
    )
    @classmethod
    def _positive(cls, value: int, info) -> int:
        if value < 1:
            raise ValueError(f"{info.field_name} must be positive, got {value}")
        return value

    @field_validator("dict_iterations", "train_images", "eval_images")
    @classmethod
    def _positive_or_none(cls, value: Optional[int], info) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError(f"{info.field_name} must be positive, got {value}")
        return value

    @field_validator("lambdas")
    @classmethod
    def _nonnegative_lambdas(cls, value: List[float]) -> List[float]:
        if any(lam < 0 for lam in value):
            raise ValueError("sparsity weights must be nonnegative")
        return value

    @field_validator("k_grid")
    @classmethod
    def _positive_k(cls, value: List[int]) -> List[int]:
        if any(k < 1 for k in value):
            raise ValueError("labels per class must be positive")
        return value

    @model_validator(mode="after")
    def _check_ranges(self) -> "ExperimentConfig":
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if self.distortion_std < 0:
            raise ValueError("distortion_std must be nonnegative")
        if self.synthetic_side < 8:
            raise ValueError("synthetic_side must be at least 8")
        unknown = set(self.metrics) - {"euclidean", "cosine"}
        if unknown:
            raise ValueError(f"unknown metrics {sorted(unknown)}")
        unknown = set(self.representations) - {"pixels", "sparse", "mlp", "random"}
        if unknown:
            raise ValueError(f"unknown representations {sorted(unknown)}")
        return self

    def updated(self, **values: Any) -> "ExperimentConfig":
        """
        Copy with some fields replaced; None values are ignored.

        Raises:
            ConfigError: If a new value is invalid
        """
        values = {key: value for key, value in values.items() if value is not None}
        if not values:
            return self
        try:
            return type(self).model_validate({**self.model_dump(), **values})
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration: {e}") from e

    def iterations_for(self, lam: float) -> int:
        """Dictionary iteration budget for a sparsity weight."""
        return self.dict_iterations or default_iterations(lam)

    def hashed_fields(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude=_UNHASHED_FIELDS)

    def config_hash(self) -> str:
        """Hash of every result-affecting setting."""
        return stable_hash(self.hashed_fields())

    def stage_hash(self, stage: str, lam: Optional[float] = None) -> str:
        """
        Hash of the settings one artifact depends on.

        Args:
            stage: One of data, dictionary, codes, mlp, random_net
            lam: Sparsity weight for dictionary and code artifacts
        """
        if stage not in _STAGE_FIELDS:
            raise ConfigError(f"Unknown stage {stage!r}")
        fields = self.hashed_fields()
        keys = _DATA_FIELDS + _STAGE_FIELDS[stage] if stage != "random_net" else ("seed",) + _STAGE_FIELDS[stage]
        payload = {key: fields[key] for key in keys}
        payload["stage"] = stage
        if stage in ("dictionary", "codes"):
            lam = self.lam if lam is None else lam
            payload["lam"] = float(lam)
            payload["iterations"] = self.iterations_for(lam)
        return stable_hash(payload)


def parse_overrides(pairs: Iterable[str]) -> Dict[str, Any]:
    """
    Parse ``key=value`` pairs; values are read as YAML scalars or lists.

    Raises:
        ConfigError: If a pair has no ``=``
    """
    overrides = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Override {pair!r} is not of the form key=value")
        try:
            overrides[key.strip().replace("-", "_")] = yaml.safe_load(raw) if raw.strip() else None
        except yaml.YAMLError as e:
            raise ConfigError(f"Cannot parse override {pair!r}: {e}") from e
    return overrides


def load_config(
    config_path: Optional[str] = None,
    overrides: Optional[Iterable[str]] = None,
    **values: Any,
) -> ExperimentConfig:
    """
    Load an experiment configuration.

    Args:
        config_path: Optional flat YAML file
        overrides: ``key=value`` pairs applied on top of the file
        **values: Explicit values (command line flags), highest priority

    Returns:
        Validated ExperimentConfig

    Raises:
        ConfigError: If the file is unreadable or a value is invalid
    """
    settings: Dict[str, Any] = {}
    if config_path:
        try:
            with open(config_path, "r") as f:
                loaded = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"Failed to load config from {config_path}: {e}") from e
        if not isinstance(loaded, dict):
            raise ConfigError(f"{config_path} must contain a flat key/value mapping")
        settings.update(loaded)
        logger.info(f"Loaded configuration from {config_path}")

    settings.update(parse_overrides(overrides or []))
    settings.update({key: value for key, value in values.items() if value is not None})

    try:
        return ExperimentConfig(**settings)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def save_config(config: ExperimentConfig, path: Path) -> Path:
    """Write the full configuration as flat YAML so the run can be repeated."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        yaml.safe_dump(config.model_dump(mode="json"), f, sort_keys=True)
    return path
