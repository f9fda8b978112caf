"""
Experiment orchestration: configuration, the stage runner, reports and the
command line interface.
"""

from src.experiment.config import ExperimentConfig, load_config, parse_overrides, save_config
from src.experiment.core import ExperimentRunner
from src.experiment.reports import ExperimentLock, emit_report, read_csv_report, write_manifest

__all__ = [
    "ExperimentConfig",
    "load_config",
    "parse_overrides",
    "save_config",
    "ExperimentRunner",
    "ExperimentLock",
    "emit_report",
    "read_csv_report",
    "write_manifest",
]
