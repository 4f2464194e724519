"""Stable on-disk record format for experiment results.

Every experiment writes the same superset of CSV columns so downstream
plotting can treat all outputs uniformly; fields that do not apply stay
empty.  Floats are serialized through repr, the shortest representation
that round-trips, which makes equal results byte-equal files.  Timing
lives only in the metadata sidecar, never in the CSV payload.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import numpy as np
import scipy

from .errors import ContractError

__all__ = ["CSV_COLUMNS", "SCHEMA_VERSION", "format_cell", "write_csv", "write_metadata"]

SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "experiment",
    "tag",
    "metric",
    "n_total",
    "n_a",
    "n_b",
    "local_dim",
    "sector",
    "sector_param",
    "basis",
    "basis_detail",
    "t",
    "tau",
    "alpha",
    "boundary",
    "disorder_variance",
    "realization",
    "generator",
    "sample_index",
    "b_index",
    "window_lo",
    "window_hi",
    "value",
    "stderr",
    "sample_count",
    "r_squared",
    "dropped_mass",
]


def format_cell(value) -> str:
    """Serialize one cell; floats go through repr for exact round-trips."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    raise ContractError(f"cannot serialize {type(value).__name__} into a CSV cell")


def write_csv(path: Path, rows: list[dict]) -> int:
    """Write rows under the fixed column set; unknown keys are an error."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            unknown = set(row) - set(CSV_COLUMNS)
            if unknown:
                raise ContractError(f"row has unknown columns {sorted(unknown)}")
            writer.writerow([format_cell(row.get(col)) for col in CSV_COLUMNS])
    return len(rows)


def write_metadata(path: Path, *, config: dict, seed: int, threads: int,
                   csv_name: str, row_count: int, truncated: bool,
                   wall_seconds: float | None) -> None:
    """JSON sidecar with provenance; wall time is the one volatile field."""
    from . import __version__

    payload = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "python_version": sys.version.split()[0],
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "seed": seed,
        "threads": threads,
        "csv": csv_name,
        "row_count": row_count,
        "truncated": truncated,
        "wall_seconds": wall_seconds,
        "config": config,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
