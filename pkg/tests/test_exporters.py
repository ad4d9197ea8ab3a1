import csv
import io
import json

import numpy as np
import pytest

from kernel_lab.core.models import ExperimentResult
from kernel_lab.exporters import CSVExporter, JSONExporter
from kernel_lab.exporters.csv_exporter import format_value


@pytest.fixture
def result():
    return ExperimentResult(
        experiment_name="rate-study",
        duration=1.5,
        success=True,
        columns=["n", "mean_risk"],
        rows=[{"n": 64, "mean_risk": 0.1}, {"n": 128, "mean_risk": 1.0 / 3.0}],
        summary={"fitted_slope": -0.25, "passed": True},
    )


@pytest.mark.parametrize(
    "value,expected",
    [
        (None, ""),
        (True, "true"),
        (np.bool_(False), "false"),
        (3, "3"),
        (np.int64(7), "7"),
        (0.1, "0.10000000000000001"),
        (np.float32(0.5), "0.5"),
        ("ntk-2", "ntk-2"),
    ],
)
def test_format_value(value, expected):
    assert format_value(value) == expected


def test_floats_round_trip_exactly():
    for value in (1.0 / 3.0, np.pi, 1e-300, -2.5e17):
        assert float(format_value(value)) == value


def test_csv_layout(result):
    text = CSVExporter().export_result(result)
    lines = text.splitlines()
    assert lines[0] == "n,mean_risk"
    assert lines[1] == "64,0.10000000000000001"
    assert lines[3] == "fitted_slope,-0.25"
    assert lines[4] == "passed,true"
    assert text.endswith("\n") and "\r" not in text


def test_csv_missing_columns_are_empty():
    text = CSVExporter().export_rows([{"a": 1}], ["a", "b"])
    assert text.splitlines() == ["a,b", "1,"]


def test_csv_quotes_fields_with_commas():
    text = CSVExporter().export_rows([{"check": "x,y", "value": 1}], ["check", "value"])
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[1] == ["x,y", "1"]


def test_json_export_is_deterministic(result):
    data = json.loads(JSONExporter().export_result(result))
    assert "timestamp" not in data and "duration" not in data
    assert data["rows"][1]["n"] == 128
    assert data["summary"]["passed"] is True

    timed = json.loads(JSONExporter(include_timing=True).export_result(result))
    assert timed["duration"] == 1.5
    assert "timestamp" in timed
