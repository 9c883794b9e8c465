"""Tests for the sht-bumps command line: run directories, artifacts and exit codes."""

import csv
import json
from pathlib import Path

import pytest

from sht_bumps.cli.runner import EXIT_ASSERTION, EXIT_INPUT, EXIT_OK, main
from sht_bumps.experiments.reports import HEADER

SPIKE = {"breakpoints": [0.0, 0.125, 1.0], "values": [8.0, 0.0]}


def _write(path: Path, payload) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def _rows(path: Path):
    with path.open(newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def _summary(out: Path):
    return json.loads((out / "summary.json").read_text(encoding="utf-8"))


def test_orlicz_norm_of_constant(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    function = _write(tmp_path / "f.json", {"breakpoints": [0.0, 1.0], "values": [3.0]})
    out = tmp_path / "run"
    code = main(["orlicz-norm", "--function", str(function), "--young", '{"family": "power", "p": 2}', "--out", str(out)])
    assert code == EXIT_OK
    assert float(capsys.readouterr().out.strip()) == pytest.approx(3.0, rel=1e-9)
    row = _rows(out / "norm.csv")[0]
    assert float(row["norm"]) == pytest.approx(3.0, rel=1e-9)
    assert float(row["lp_average"]) == pytest.approx(3.0, rel=1e-12)
    summary = _summary(out)
    assert summary["header"] == HEADER
    assert summary["exit_code"] == EXIT_OK
    assert summary["summary"]["diagnostics"]["superlinear"]


def test_counterexample_double_writes_run_directory(tmp_path: Path) -> None:
    out = tmp_path / "ce"
    assert main(["counterexample", "--mode", "double", "--n-max", "30", "--out", str(out)]) == EXIT_OK
    rows = _rows(out / "double.csv")
    assert [int(row["n"]) for row in rows] == list(range(2, 31))
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "counterexample"
    assert manifest["mode"] == "double"
    assert {entry["path"] for entry in manifest["files"]} == {"double.csv", "summary.json"}


def test_counterexample_build_table(tmp_path: Path) -> None:
    out = tmp_path / "blocks"
    assert main(["counterexample", "--mode", "build", "--n-max", "12", "--out", str(out)]) == EXIT_OK
    assert [int(row["n"]) for row in _rows(out / "blocks.csv")] == list(range(2, 13))


def test_grid_verify_flags_corrupted_grid(tmp_path: Path) -> None:
    built = tmp_path / "grid"
    assert main(["grid-build", "--k-max", "3", "--out", str(built)]) == EXIT_OK
    assert main(["grid-verify", "--grid", str(built / "grid.json"), "--out", str(tmp_path / "ok")]) == EXIT_OK

    payload = json.loads((built / "grid.json").read_text(encoding="utf-8"))
    payload["generations"][-1]["cubes"][0]["intervals"] = [[0.0, 0.2]]
    broken = _write(tmp_path / "broken.json", payload)
    out = tmp_path / "bad"
    assert main(["grid-verify", "--grid", str(broken), "--out", str(out)]) == EXIT_ASSERTION
    summary = _summary(out)
    assert summary["exit_code"] == EXIT_ASSERTION
    assert summary["witness"]
    assert any(row["ok"] == "False" for row in _rows(out / "properties.csv"))


def test_sparse_build_then_apply(tmp_path: Path) -> None:
    function = _write(tmp_path / "spike.json", SPIKE)
    built = tmp_path / "family"
    assert main(["sparse-build", "--function", str(function), "--k-max", "6", "--a", "4", "--out", str(built)]) == EXIT_OK
    assert _summary(built)["summary"]["domination_holds"]
    assert len(_rows(built / "family.csv")) == 2

    applied = tmp_path / "apply"
    code = main(
        [
            "sparse-apply",
            "--function",
            str(function),
            "--grid",
            str(built / "grid.json"),
            "--family",
            str(built / "family.json"),
            "--out",
            str(applied),
        ]
    )
    assert code == EXIT_OK
    assert _summary(applied)["summary"]["cubes"] == 2
    assert (applied / "output.csv").exists()


def test_missing_input_file_is_an_input_error(tmp_path: Path) -> None:
    out = tmp_path / "missing"
    code = main(["orlicz-norm", "--function", str(tmp_path / "nope.json"), "--out", str(out)])
    assert code == EXIT_INPUT
    summary = _summary(out)
    assert summary["exit_code"] == EXIT_INPUT
    assert summary["error"].startswith("input error")


def test_out_of_domain_parameters_are_rejected(tmp_path: Path) -> None:
    assert main(["grid-build", "--p", "1.0", "--out", str(tmp_path / "p")]) == EXIT_INPUT
    assert main(["grid-build", "--k-min", "4", "--k-max", "2", "--out", str(tmp_path / "k")]) == EXIT_INPUT
    assert main(["counterexample", "--mode", "double", "--n-max", "1", "--out", str(tmp_path / "n")]) == EXIT_INPUT


def test_flags_override_config_file(tmp_path: Path) -> None:
    config = _write(tmp_path / "config.json", {"p": 3.0, "k_max": 2, "seed": 5})
    out = tmp_path / "run"
    assert main(["grid-build", "--config", str(config), "--p", "2.5", "--out", str(out)]) == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["p"] == 2.5
    assert manifest["config"]["k_max"] == 2
    assert manifest["config"]["seed"] == 5
    assert [int(row["generation"]) for row in _rows(out / "generations.csv")] == [0, 1, 2]


def test_nested_config_file_is_rejected(tmp_path: Path) -> None:
    config = _write(tmp_path / "config.json", {"grid": {"kind": "line"}})
    assert main(["grid-build", "--config", str(config), "--out", str(tmp_path / "run")]) == EXIT_INPUT


def test_cz_decompose_refines_grid_for_narrow_spike(tmp_path: Path) -> None:
    function = _write(tmp_path / "narrow.json", {"breakpoints": [0.0, 0.001953125, 1.0], "values": [10.0, 0.0]})
    out = tmp_path / "cz"
    assert main(["cz-decompose", "--function", str(function), "--lambda", "3", "--out", str(out)]) == EXIT_OK
    summary = _summary(out)["summary"]
    assert summary["cubes"] == 1
    assert summary["max_g"] == pytest.approx(5.0)
    assert summary["g_over_lambda"] <= summary["constant"]
    grid = json.loads((out / "grid.json").read_text(encoding="utf-8"))
    assert grid["generations"][-1]["k"] == 9
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["k_max"] == 6


def test_cz_decompose_of_unresolvable_function_is_an_input_error(tmp_path: Path) -> None:
    function = _write(tmp_path / "spike.json", {"breakpoints": [0.0, 0.001, 1.0], "values": [10.0, 0.0]})
    out = tmp_path / "cz"
    assert main(["cz-decompose", "--function", str(function), "--lambda", "3", "--out", str(out)]) == EXIT_INPUT
    summary = _summary(out)
    assert summary["exit_code"] == EXIT_INPUT
    assert "does not resolve" in summary["error"]


def test_default_run_directory_follows_results_root(tmp_path: Path) -> None:
    assert main(["counterexample", "--mode", "build", "--n-max", "5"]) == EXIT_OK
    run = tmp_path / "results" / "counterexample-build-seed0"
    assert _summary(run)["exit_code"] == EXIT_OK
    assert (run / "blocks.csv").exists()


def test_verify_thm_separated_suite(tmp_path: Path) -> None:
    out = tmp_path / "sep"
    assert main(["verify-thm", "--tag", "separated", "--count", "2", "--out", str(out)]) == EXIT_OK
    rows = _rows(out / "separated.csv")
    assert [int(row["instance"]) for row in rows] == [0, 1]
    assert all(float(row["weak"]) <= float(row["strong"]) * (1.0 + 1e-9) for row in rows)
    checks = _summary(out)["summary"]["checks"]
    assert checks["weak_trend"] and checks["strong_trend"]
