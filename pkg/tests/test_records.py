import json

import numpy as np
import pytest

from symdesigns import ContractError
from symdesigns.records import CSV_COLUMNS, format_cell, write_csv, write_metadata


def test_format_cell_covers_supported_types():
    assert format_cell(None) == ""
    assert format_cell("abc") == "abc"
    assert format_cell(True) == "true"
    assert format_cell(np.bool_(False)) == "false"
    assert format_cell(7) == "7"
    assert format_cell(np.int64(-3)) == "-3"
    assert format_cell(0.1) == "0.1"
    assert format_cell(np.float64(1.0) / 3.0) == "0.3333333333333333"
    with pytest.raises(ContractError):
        format_cell(object())


def test_float_cells_round_trip_exactly():
    for value in (1e-17, 0.1 + 0.2, np.pi, 2.0 ** -52):
        assert float(format_cell(value)) == value


def test_write_csv_layout(tmp_path):
    path = tmp_path / "sub" / "out.csv"
    rows = [
        {"experiment": "design-scan", "metric": "delta", "t": 2, "value": 0.25},
        {"experiment": "design-scan", "metric": "delta", "t": 3, "value": 1.0 / 3.0},
    ]
    count = write_csv(path, rows)
    assert count == 2
    text = path.read_bytes().decode()
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 4 and lines[-1] == ""
    assert "\r" not in text
    first = dict(zip(CSV_COLUMNS, lines[1].split(",")))
    assert first["experiment"] == "design-scan"
    assert first["t"] == "2"
    assert first["value"] == "0.25"
    assert first["tau"] == ""


def test_write_csv_rejects_unknown_columns(tmp_path):
    with pytest.raises(ContractError):
        write_csv(tmp_path / "bad.csv", [{"metric": "delta", "bogus": 1}])


def test_write_metadata_sidecar(tmp_path):
    path = tmp_path / "run.meta.json"
    write_metadata(path, config={"experiment": {"kind": "design-scan", "seed": 3}},
                   seed=3, threads=2, csv_name="run.csv", row_count=12,
                   truncated=False, wall_seconds=1.5)
    payload = json.loads(path.read_text())
    assert payload["schema_version"] == 1
    assert payload["seed"] == 3
    assert payload["threads"] == 2
    assert payload["csv"] == "run.csv"
    assert payload["row_count"] == 12
    assert payload["truncated"] is False
    assert payload["config"]["experiment"]["kind"] == "design-scan"
    for key in ("package_version", "python_version", "numpy_version", "scipy_version"):
        assert key in payload
