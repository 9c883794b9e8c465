"""Tests for the run browser over CLI run directories."""

import json
from pathlib import Path

from sht_bumps.app import create_dash_app
from sht_bumps.app.services.results_loader import (
    artifact_options,
    artifact_rows,
    get_artifact_payload,
    load_results_repository,
    render_json_preview,
    run_options,
    run_status_rows,
)
from sht_bumps.cli.runner import main


def _populate(root: Path) -> None:
    assert main(["grid-build", "--k-max", "2", "--out", str(root / "grid-build-seed0")]) == 0
    assert main(["counterexample", "--mode", "build", "--n-max", "6", "--out", str(root / "counterexample-build-seed0")]) == 0


def test_repository_loads_cli_runs(tmp_path: Path) -> None:
    _populate(tmp_path)
    repository = load_results_repository(tmp_path)

    assert repository["run_count"] == 2
    assert repository["errors"] == []
    assert [run["command"] for run in repository["runs"]] == ["counterexample", "grid-build"]
    assert repository["default_run_id"] == "grid-build-seed0"
    assert [option["value"] for option in run_options(repository)] == ["counterexample-build-seed0", "grid-build-seed0"]


def test_artifact_rows_for_csv_and_json(tmp_path: Path) -> None:
    _populate(tmp_path)
    repository = load_results_repository(tmp_path)

    blocks = artifact_rows(repository, "counterexample-build-seed0", "blocks")
    assert [row["n"] for row in blocks] == ["2", "3", "4", "5", "6"]
    summary = artifact_rows(repository, "grid-build-seed0", "summary")
    assert {"key": "exit_code", "value": 0} in summary
    assert {option["value"] for option in artifact_options(repository, "grid-build-seed0")} == {
        "generations",
        "grid",
        "summary",
    }
    assert artifact_rows(repository, "grid-build-seed0", "missing") == []
    assert get_artifact_payload(repository, None, "summary") is None


def test_status_rows_report_exit_codes(tmp_path: Path) -> None:
    _populate(tmp_path)
    assert main(["orlicz-norm", "--function", str(tmp_path / "nope.json"), "--out", str(tmp_path / "orlicz-norm-seed0")]) == 2
    rows = {row["run"]: row for row in run_status_rows(load_results_repository(tmp_path))}
    assert rows["grid-build-seed0"]["exit_code"] == 0
    assert rows["orlicz-norm-seed0"]["exit_code"] == 2
    assert rows["counterexample-build-seed0"]["mode"] == "build"


def test_invalid_json_is_reported_not_raised(tmp_path: Path) -> None:
    run_dir = tmp_path / "hand-made"
    run_dir.mkdir()
    (run_dir / "summary.json").write_text("{not json", encoding="utf-8")
    (run_dir / "table.csv").write_text("a,b\n1,2\n", encoding="utf-8")

    repository = load_results_repository(tmp_path)
    run = repository["runs"][0]
    assert run["command"] == "hand-made"
    assert run["exit_code"] is None
    assert len(run["errors"]) == 1
    assert repository["errors"][0].startswith("hand-made: Invalid JSON")
    assert artifact_rows(repository, "hand-made", "summary") == []
    assert artifact_rows(repository, "hand-made", "table") == [{"a": "1", "b": "2"}]


def test_missing_root(tmp_path: Path) -> None:
    repository = load_results_repository(tmp_path / "absent")
    assert repository["run_count"] == 0
    assert repository["default_run_id"] is None
    assert repository["errors"]


def test_preview_truncates_large_payloads() -> None:
    preview = render_json_preview({"values": list(range(1000))}, max_chars=50)
    assert "[truncated" in preview
    assert json.loads(render_json_preview({"a": 1})) == {"a": 1}


def test_dash_app_builds_over_run_directories(tmp_path: Path) -> None:
    _populate(tmp_path)
    app = create_dash_app(tmp_path)
    assert app.title == "Sparse Bump Runs"
    assert app.layout is not None
