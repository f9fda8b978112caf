"""
Utility modules for the toolkit.
"""

from src.utils.logging import setup_logging
from src.utils.helpers import load_env, sample_rng, stable_hash, format_float
from src.utils.artifacts import load_arrays, save_arrays

__all__ = [
    "setup_logging",
    "load_env",
    "sample_rng",
    "stable_hash",
    "format_float",
    "load_arrays",
    "save_arrays",
]
