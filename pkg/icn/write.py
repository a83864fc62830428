"""Write module for reports, element streams and formula deviations."""

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable

DEVIATIONS_FILENAME = "paper-deviations.json"


def write_report(path: str | Path, report: dict | list) -> Path:
    """
    Write a command report as pretty-printed JSON.

    Args:
        path: Target file path
        report: JSON-serializable report

    Returns:
        The path written
    """
    path = Path(path)
    _write_json_atomic(path, report)
    return path


def write_deviations(report_path: str | Path, deviations: list[dict]) -> Path:
    """
    Write the deviation records next to a report file.

    The file is always written, with an empty list when every formula held,
    so a stale file from an earlier run never survives.

    Args:
        report_path: Path of the report the deviations belong to
        deviations: Records with identity, n, indices, expected, actual, replacement

    Returns:
        Path of the deviations file
    """
    target = Path(report_path).parent / DEVIATIONS_FILENAME
    _write_json_atomic(target, deviations)
    return target


def write_jsonl(path: str | Path, records: Iterable[dict]) -> int:
    """
    Write one compact JSON object per line, atomically.

    Args:
        path: Target file path
        records: JSON-serializable dicts

    Returns:
        Number of lines written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    temp_fd, temp_path = tempfile.mkstemp(dir=path.parent, prefix=".tmp_", suffix=".jsonl")
    count = 0
    try:
        with os.fdopen(temp_fd, "w") as f:
            for record in records:
                f.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
                f.write("\n")
                count += 1
        os.replace(temp_path, path)
    except (OSError, IOError):
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise
    return count


def _write_json_atomic(file_path: Path, data: dict | list) -> None:
    """
    Write JSON to file atomically using temp file + rename.

    Args:
        file_path: Target file path
        data: Data to write
    """
    file_path.parent.mkdir(parents=True, exist_ok=True)

    # Write to temp file in same directory
    temp_fd, temp_path = tempfile.mkstemp(
        dir=file_path.parent, prefix=".tmp_", suffix=".json"
    )

    try:
        with os.fdopen(temp_fd, "w") as f:
            json.dump(data, f, indent=2, sort_keys=True)

        # Atomic rename
        os.replace(temp_path, file_path)
    except (OSError, IOError):
        # Clean up temp file on error
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise
