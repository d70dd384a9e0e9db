# src/system/output.py
#18 Oct 2026

import csv
import json
import logging
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from src.system.safety import require_safe_output_file


def _cell(value):
    # repr keeps every digit, so identical runs give byte-identical files
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return value


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, Path):
        return str(value)
    return value


def write_csv(path: Path | None, header: Sequence[str], rows: Iterable[Sequence], logger=None) -> None:
    """Writes rows as CSV to path, or to stdout when path is None."""
    logger = logger or logging.getLogger(__name__)
    if path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        return

    path = Path(path)
    require_safe_output_file(path, "CSV output", logger)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow([_cell(v) for v in row])
            count += 1
    logger.info(f"[Output] Wrote {count} rows to {path}")


def write_json(path: Path | None, payload: dict, logger=None) -> None:
    """Writes payload as sorted, indented JSON to path, or to stdout when path is None."""
    logger = logger or logging.getLogger(__name__)
    text = json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
        return

    path = Path(path)
    require_safe_output_file(path, "JSON output", logger)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(text)
    logger.info(f"[Output] Wrote {path}")
