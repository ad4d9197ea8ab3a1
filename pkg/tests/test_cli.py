import csv
import json

import pytest
from click.testing import CliRunner

from kernel_lab import __version__
from kernel_lab.cli import cli


@pytest.fixture
def runner():
    return CliRunner()


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.reader(f))


def test_help_lists_exit_codes(runner):
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    assert "Exit codes:" in result.output
    for name in ("ConfigError", "FormatError", "DegenerateFitError", "ExperimentError"):
        assert name in result.output
    for command in ("estimate-smoothness", "rate-study", "fit-predict", "kernel-check", "hard-instance"):
        assert command in result.output


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_kernel_check_ntk(runner, tmp_path):
    out = tmp_path / "check.csv"
    result = runner.invoke(cli, ["kernel-check", "--kernel", "ntk", "--depth", "2", "--n", "120", "--out", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert rows[0] == ["check", "value", "expected", "passed"]
    table = {row[0]: row for row in rows[1:] if len(row) == 4}
    assert float(table["diagonal"][1]) == pytest.approx(3.0)
    assert table["min_eigenvalue"][3] == "true"
    assert ["passed", "true"] in rows


def test_estimate_smoothness_is_byte_identical(runner, tmp_path):
    args = ["estimate-smoothness", "--kernel", "min", "--model", "cos2pix", "--n", "150",
            "--truncation", "30", "--beta", "2", "--reps", "3", "--seed", "7"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert runner.invoke(cli, args + ["--out", str(first)]).exit_code == 0
    assert runner.invoke(cli, ["--threads", "2"] + args + ["--out", str(second)]).exit_code == 0
    assert first.read_bytes() == second.read_bytes()

    rows = read_csv(first)
    assert rows[0] == ["rep", "s_hat"]
    assert [row[0] for row in rows[1:4]] == ["0", "1", "2"]
    footer = dict(row for row in rows[4:])
    assert set(footer) == {"beta", "truncation", "mean", "std"}


def test_estimate_smoothness_to_stdout(runner):
    result = runner.invoke(cli, ["estimate-smoothness", "--model", "cos2pix", "--n", "60", "--truncation", "10", "--reps", "2"])
    assert result.exit_code == 0
    assert "rep,s_hat" in result.output


def test_rate_study(runner, tmp_path):
    out = tmp_path / "rate.csv"
    result = runner.invoke(cli, [
        "rate-study", "--kernel", "min", "--model", "cos2pix", "--s", "0.5", "--beta", "2",
        "--n-grid", "32,64,128", "--reps", "3", "--seed", "1", "--quadrature-points", "1001",
        "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert rows[0] == ["n", "mean_risk", "std", "nu"]
    assert [row[0] for row in rows[1:4]] == ["32", "64", "128"]
    footer = dict(rows[4:])
    assert float(footer["theoretical_slope"]) == pytest.approx(-0.25)
    assert "fitted_slope" in footer


def test_fit_predict_json(runner, tmp_path):
    out = tmp_path / "fit.json"
    result = runner.invoke(cli, [
        "fit-predict", "--model", "cos2pix", "--n", "64", "--nu", "30", "--filter", "ridge",
        "--n-test", "50", "--quadrature-points", "501", "--format", "json", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["columns"] == ["x", "f_hat", "label", "f_star"]
    assert len(data["rows"]) == 50
    assert data["summary"]["nu"] == 30.0


def test_hard_instance(runner, tmp_path):
    out = tmp_path / "hard.csv"
    result = runner.invoke(cli, ["hard-instance", "--q", "8", "--n", "40", "--n-test", "200", "--out", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert rows[0] == ["x", "y", "cell", "f"]
    assert "codebook_size" in dict(row for row in rows[41:])


def test_config_error_exit_code(runner):
    result = runner.invoke(cli, ["rate-study", "--model", "cos2pix", "--s", "0.5", "--beta", "2", "--n-grid", "64,128"])
    assert result.exit_code == 2


def test_bad_n_grid_is_a_usage_error(runner):
    result = runner.invoke(cli, ["rate-study", "--n-grid", "64,abc"])
    assert result.exit_code == 2


def test_format_error_exit_code(runner, tmp_path):
    images = tmp_path / "images"
    labels = tmp_path / "labels"
    images.write_bytes(b"\x00\x00\x08\x02\x00\x00\x00\x01")
    labels.write_bytes(b"\x00\x00\x08\x01\x00\x00\x00\x01\x01")
    result = runner.invoke(cli, [
        "estimate-smoothness", "--dataset", "mnist", "--kernel", "ntk",
        "--images", str(images), "--labels", str(labels), "--n", "5",
    ])
    assert result.exit_code == 9


def test_missing_output_directory_exit_code(runner, tmp_path):
    out = tmp_path / "missing" / "check.csv"
    result = runner.invoke(cli, ["kernel-check", "--kernel", "ntk", "--n", "20", "--out", str(out)])
    assert result.exit_code == 3


def test_config_file_with_flag_override(runner, tmp_path):
    config = tmp_path / "experiment.yaml"
    config.write_text("model: cos2pix\nn: 80\ntruncation: 12\nreps: 5\nseed: 3\n", encoding="utf-8")
    out = tmp_path / "s.csv"
    result = runner.invoke(cli, ["--config", str(config), "estimate-smoothness", "--reps", "2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert [row[0] for row in rows[1:3]] == ["0", "1"]
    assert dict(rows[3:])["truncation"] == "12"


def test_invalid_config_file(runner, tmp_path):
    config = tmp_path / "bad.yaml"
    config.write_text("- just\n- a list\n", encoding="utf-8")
    result = runner.invoke(cli, ["--config", str(config), "kernel-check"])
    assert result.exit_code == 2


def test_estimate_smoothness_naive_noiseless(runner, tmp_path):
    out = tmp_path / "naive.csv"
    result = runner.invoke(cli, [
        "estimate-smoothness", "--model", "cos2pix", "--n", "120", "--sigma", "0",
        "--naive", "--reps", "2", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    footer = dict(row for row in read_csv(out)[3:])
    assert footer["truncation"] == "none"
    assert float(footer["std"]) == 0.0


def test_estimate_smoothness_design_choice(runner):
    result = runner.invoke(cli, [
        "estimate-smoothness", "--model", "cos2pix", "--n", "60", "--truncation", "10",
        "--reps", "2", "--design", "random",
    ])
    assert result.exit_code == 0, result.output
    bad = runner.invoke(cli, ["estimate-smoothness", "--model", "cos2pix", "--n", "60", "--design", "spiral"])
    assert bad.exit_code == 2
