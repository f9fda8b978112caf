"""
Array artifacts on disk.

Every artifact is an uncompressed ``.npz`` archive holding named arrays plus
a ``header`` entry: a JSON document with at least ``format``, ``kind`` and
``stage_hash``. Files are written to a temporary name and renamed into place
so a crashed run never leaves a half-written checkpoint behind.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.utils.errors import MissingArtifactError, StaleArtifactError

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
PathLike = Union[str, Path]


def save_arrays(path: PathLike, header: Dict[str, Any], **arrays: np.ndarray) -> Path:
    """
    Write named arrays and a JSON header atomically.

    Args:
        path: Destination file
        header: JSON-serializable metadata
        **arrays: Arrays to store

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"format": FORMAT_VERSION, **header}
    payload = {name: np.asarray(value) for name, value in arrays.items()}
    payload["header"] = np.array(json.dumps(document, sort_keys=True))

    tmp_path = path.with_name(path.name + ".tmp")
    with open(tmp_path, "wb") as handle:
        np.savez(handle, **payload)
    os.replace(tmp_path, path)
    logger.debug(f"Wrote artifact {path} ({', '.join(sorted(arrays))})")
    return path


def load_arrays(
    path: PathLike,
    expected_hash: Optional[str] = None,
) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    """
    Read an artifact written by ``save_arrays``.

    Args:
        path: Artifact file
        expected_hash: When given, the header's ``stage_hash`` must match

    Returns:
        (header, arrays)

    Raises:
        MissingArtifactError: If the file does not exist
        StaleArtifactError: If the stage hash differs from ``expected_hash``
    """
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"Required artifact not found: {path}")

    with np.load(path, allow_pickle=False) as archive:
        header = json.loads(str(archive["header"]))
        arrays = {name: archive[name] for name in archive.files if name != "header"}

    if expected_hash is not None and header.get("stage_hash") != expected_hash:
        raise StaleArtifactError(
            f"{path} was produced by configuration {header.get('stage_hash')}, "
            f"expected {expected_hash}"
        )
    return header, arrays
