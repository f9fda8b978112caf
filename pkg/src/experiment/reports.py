"""
Report files: CSV tables and JSON summaries with a provenance header, run
manifests and the output directory lock.

Reports contain nothing that changes between identical runs; the wall-clock
timestamp is written only to the manifest.
"""

import csv
import json
import logging
import os
import platform
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import scipy

from src.utils.errors import ArtifactWriteError, ExperimentLockedError
from src.utils.helpers import format_float

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")
LOCK_NAME = ".lock"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(item) for item in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def emit_report(
    results: Union[Sequence[Mapping[str, Any]], Mapping[str, Any]],
    path: Union[str, Path],
    format: str = "csv",
    columns: Optional[Sequence[str]] = None,
    provenance: Optional[Mapping[str, Any]] = None,
) -> Path:
    """
    Write results as a CSV table or a JSON document.

    CSV files start with one ``# key=value`` line per provenance entry,
    followed by the header and one row per record; floats carry 17
    significant digits. JSON documents hold ``provenance`` and ``results``
    with sorted keys.

    Args:
        results: Records for CSV, any JSON-compatible structure for JSON
        path: Destination file
        format: "csv" or "json"
        columns: CSV column order (defaults to the keys of the first record)
        provenance: Config hash, seed and other run identifiers

    Returns:
        Path written

    Raises:
        ValueError: On an unknown format or a CSV without columns
        ArtifactWriteError: If the file cannot be written
    """
    if format not in FORMATS:
        raise ValueError(f"Unsupported report format {format!r}; expected one of {FORMATS}")
    path = Path(path)
    provenance = dict(provenance or {})

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if format == "csv":
            records = list(results)
            if columns is None:
                if not records:
                    raise ValueError("An empty CSV report needs explicit columns")
                columns = list(records[0].keys())
            with open(path, "w", newline="") as f:
                for key in sorted(provenance):
                    f.write(f"# {key}={_cell(provenance[key])}\n")
                writer = csv.DictWriter(f, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
                writer.writeheader()
                for record in records:
                    writer.writerow({column: _cell(record.get(column)) for column in columns})
        else:
            document = {"provenance": _jsonable(provenance), "results": _jsonable(results)}
            with open(path, "w") as f:
                json.dump(document, f, indent=2, sort_keys=True)
                f.write("\n")
    except OSError as e:
        raise ArtifactWriteError(f"Failed to write report {path}: {e}") from e

    logger.info(f"Wrote {format} report {path}")
    return path


def read_csv_report(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a CSV report back.

    Returns:
        {"provenance": {...}, "rows": [...]} with every value as a string
    """
    provenance: Dict[str, str] = {}
    lines: List[str] = []
    with open(path, "r", newline="") as f:
        for line in f:
            if line.startswith("# ") and not lines:
                key, _, value = line[2:].rstrip("\n").partition("=")
                provenance[key] = value
            else:
                lines.append(line)
    return {"provenance": provenance, "rows": list(csv.DictReader(lines))}


def _relative(path: Path, root: Path) -> str:
    return str(path.relative_to(root)) if path.is_relative_to(root) else str(path)


def versions() -> Dict[str, str]:
    from src import __version__

    return {
        "sparse_sensitivity": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def write_manifest(
    output_dir: Union[str, Path],
    command: str,
    config_hash: str,
    config: Mapping[str, Any],
    artifacts: Sequence[Union[str, Path]],
) -> Path:
    """
    Record what a subcommand produced and under which configuration.

    Returns:
        Path of ``manifest-<command>.json``
    """
    output_dir = Path(output_dir)
    manifest = {
        "command": command,
        "config_hash": config_hash,
        "config": _jsonable(config),
        "versions": versions(),
        "artifacts": sorted(_relative(Path(a), output_dir) for a in artifacts),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    path = output_dir / f"manifest-{command}.json"
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise ArtifactWriteError(f"Failed to write manifest {path}: {e}") from e
    return path


class ExperimentLock:
    """
    Exclusive lock on an output directory, held for the duration of a run.

    Usage:
        with ExperimentLock(output_dir):
            ...
    """

    def __init__(self, output_dir: Union[str, Path]):
        self.path = Path(output_dir) / LOCK_NAME

    def __enter__(self) -> "ExperimentLock":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as e:
            raise ExperimentLockedError(
                f"{self.path.parent} is locked by another run; remove {self.path} if that run died"
            ) from e
        with os.fdopen(fd, "w") as f:
            f.write(str(os.getpid()))
        return self

    def __exit__(self, *exc_info) -> None:
        try:
            self.path.unlink()
        except FileNotFoundError:
            logger.warning(f"Lock file {self.path} disappeared during the run")
