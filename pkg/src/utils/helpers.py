"""
Helper utilities shared across the toolkit.
"""

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np
from dotenv import load_dotenv


def load_env(env_file: str = ".env") -> bool:
    """
    Load environment variables from .env file.

    Args:
        env_file: Path to .env file

    Returns:
        True if loaded successfully, False otherwise
    """
    env_path = Path(env_file)

    if env_path.exists():
        load_dotenv(env_path)
        return True
    else:
        # Try to load from parent directories
        for parent in env_path.resolve().parents:
            parent_env = parent / ".env"
            if parent_env.exists():
                load_dotenv(parent_env)
                return True

    return False


def sample_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    Build an independent random stream keyed by a seed and integer keys.

    Streams for (seed, 0) and (seed, 1) are statistically independent and do
    not depend on the order in which they are requested.

    Args:
        seed: Experiment seed
        *keys: Extra integer keys (sample index, perturbation kind, ...)

    Returns:
        numpy Generator

    Examples:
        >>> a = sample_rng(0, 5).standard_normal()
        >>> b = sample_rng(0, 5).standard_normal()
        >>> a == b
        True
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *[int(k) for k in keys]]))


def stable_hash(payload: Any, length: int = 16) -> str:
    """
    Hash a JSON-serializable payload independently of dict ordering.

    Args:
        payload: Object accepted by ``json.dumps``
        length: Number of hex digits to keep

    Returns:
        Hex digest prefix
    """
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:length]


def format_float(value: float) -> str:
    """Serialize a float with 17 significant digits."""
    return format(float(value), ".17g")

