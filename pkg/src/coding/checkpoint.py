"""
Dictionary checkpoints.

A checkpoint stores the m x n dictionary, optionally the persistent training
codes, and a header with m, n, lam, seed, iteration and the stage hash of
the configuration that produced it.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from src.coding.types import Dictionary
from src.utils.artifacts import load_arrays, save_arrays


@dataclass(frozen=True)
class Checkpoint:
    """A dictionary restored from disk together with its provenance."""

    dictionary: Dictionary
    seed: int
    iteration: int
    stage_hash: Optional[str]
    codes: Optional[np.ndarray] = None


def save_checkpoint(
    path: Union[str, Path],
    dictionary: Dictionary,
    seed: int,
    iteration: int,
    stage_hash: Optional[str] = None,
    codes: Optional[np.ndarray] = None,
) -> Path:
    """
    Persist a dictionary and (optionally) its training codes.

    Args:
        path: Destination ``.npz`` file
        dictionary: Trained dictionary
        seed: Training seed
        iteration: Completed training iterations
        stage_hash: Hash of the configuration fields the dictionary depends on
        codes: Optional T x n persistent codes

    Returns:
        Path written
    """
    header = {
        "kind": "dictionary",
        "m": dictionary.m,
        "n": dictionary.n,
        "lam": dictionary.lam,
        "seed": int(seed),
        "iteration": int(iteration),
        "stage_hash": stage_hash,
    }
    arrays = {"atoms": dictionary.atoms}
    if codes is not None:
        arrays["codes"] = np.asarray(codes, dtype=np.float64)
    return save_arrays(path, header, **arrays)


def load_checkpoint(path: Union[str, Path], expected_hash: Optional[str] = None) -> Checkpoint:
    """
    Restore a dictionary checkpoint.

    Raises:
        MissingArtifactError: If the file is absent
        StaleArtifactError: If it was produced by a different configuration
    """
    header, arrays = load_arrays(path, expected_hash=expected_hash)
    dictionary = Dictionary.from_matrix(arrays["atoms"], header["lam"])
    return Checkpoint(
        dictionary=dictionary,
        seed=header["seed"],
        iteration=header["iteration"],
        stage_hash=header.get("stage_hash"),
        codes=arrays.get("codes"),
    )
