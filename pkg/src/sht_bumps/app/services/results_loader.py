"""Run-directory repository loading and artifact browsing utilities."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Optional


def _read_json(file_path: Path) -> Any:
    try:
        with file_path.open("r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        return {"_error": f"Missing file: {file_path}"}
    except json.JSONDecodeError as exc:
        return {"_error": f"Invalid JSON in {file_path.name}: {exc}"}


def _read_csv(file_path: Path) -> Any:
    try:
        with file_path.open("r", encoding="utf-8", newline="") as handle:
            return list(csv.DictReader(handle))
    except FileNotFoundError:
        return {"_error": f"Missing file: {file_path}"}
    except csv.Error as exc:
        return {"_error": f"Invalid CSV in {file_path.name}: {exc}"}


def _read_artifact(file_path: Path) -> Any:
    if file_path.suffix == ".csv":
        return _read_csv(file_path)
    return _read_json(file_path)


def _load_run(run_dir: Path) -> Dict[str, Any]:
    manifest_path = run_dir / "manifest.json"
    manifest = _read_json(manifest_path) if manifest_path.exists() else {}
    errors: List[str] = []
    if isinstance(manifest, dict) and "_error" in manifest:
        errors.append(manifest["_error"])
    if not isinstance(manifest, dict) or "_error" in manifest:
        manifest = {}

    artifacts: Dict[str, Dict[str, Any]] = {}
    files_meta = manifest.get("files", [])
    if isinstance(files_meta, list) and files_meta:
        entries = [item for item in files_meta if isinstance(item, dict)]
    else:
        entries = [{"name": path.stem, "path": path.name} for path in sorted(run_dir.glob("*.csv")) + sorted(run_dir.glob("*.json"))]
        entries = [item for item in entries if item["path"] != "manifest.json"]

    for item in entries:
        name = str(item.get("name") or Path(str(item.get("path", ""))).stem)
        artifact_path = run_dir / str(item.get("path") or f"{name}.json")
        payload = _read_artifact(artifact_path)
        if isinstance(payload, dict) and "_error" in payload:
            errors.append(payload["_error"])
        artifacts[name] = {"name": name, "path": str(artifact_path), "meta": item, "payload": payload}

    summary = artifacts.get("summary", {}).get("payload")
    return {
        "id": run_dir.name,
        "path": str(run_dir),
        "command": manifest.get("command") or run_dir.name.split("-seed")[0],
        "mode": manifest.get("mode"),
        "manifest": manifest,
        "exit_code": summary.get("exit_code") if isinstance(summary, dict) else None,
        "artifact_count": len(artifacts),
        "artifacts": artifacts,
        "errors": errors,
    }


def load_results_repository(results_root: Path | str) -> Dict[str, Any]:
    root = Path(results_root)
    if not root.exists():
        return {
            "root": str(root),
            "run_count": 0,
            "runs": [],
            "default_run_id": None,
            "errors": [f"Results root does not exist: {root}"],
        }

    runs = [_load_run(run_dir) for run_dir in sorted(path for path in root.iterdir() if path.is_dir())]
    runs.sort(key=lambda item: (str(item["command"]), item["id"]))
    errors = [f"{run['id']}: {message}" for run in runs for message in run["errors"]]
    return {
        "root": str(root),
        "run_count": len(runs),
        "runs": runs,
        "default_run_id": runs[-1]["id"] if runs else None,
        "errors": errors,
    }


def get_run(repository: Dict[str, Any], run_id: Optional[str]) -> Optional[Dict[str, Any]]:
    if not run_id:
        return None
    for run in repository.get("runs", []):
        if run.get("id") == run_id:
            return run
    return None


def get_artifact_payload(repository: Dict[str, Any], run_id: Optional[str], artifact: Optional[str]) -> Any:
    run = get_run(repository, run_id)
    if not run or not artifact:
        return None
    entry = run.get("artifacts", {}).get(artifact)
    return entry.get("payload") if entry else None


def artifact_rows(repository: Dict[str, Any], run_id: Optional[str], artifact: Optional[str]) -> List[Dict[str, Any]]:
    """Rows of a CSV artifact; JSON objects become one key/value row per entry."""
    payload = get_artifact_payload(repository, run_id, artifact)
    if isinstance(payload, list):
        return [row for row in payload if isinstance(row, dict)]
    if isinstance(payload, dict) and "_error" not in payload:
        return [{"key": key, "value": json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else value} for key, value in sorted(payload.items())]
    return []


def run_options(repository: Dict[str, Any]) -> List[Dict[str, str]]:
    return [{"label": f"{run['command']} / {run['id']}", "value": str(run["id"])} for run in repository.get("runs", [])]


def artifact_options(repository: Dict[str, Any], run_id: Optional[str]) -> List[Dict[str, str]]:
    run = get_run(repository, run_id)
    if not run:
        return []
    return [{"label": name, "value": name} for name in sorted(run.get("artifacts", {}))]


def run_status_rows(repository: Dict[str, Any]) -> List[Dict[str, Any]]:
    return [
        {
            "run": run["id"],
            "command": run["command"],
            "mode": run.get("mode"),
            "exit_code": run.get("exit_code"),
            "artifacts": run["artifact_count"],
            "errors": len(run["errors"]),
        }
        for run in repository.get("runs", [])
    ]


def render_json_preview(payload: Any, max_chars: int = 120_000) -> str:
    try:
        serialized = json.dumps(payload, indent=2, ensure_ascii=False)
    except TypeError:
        serialized = str(payload)

    if len(serialized) <= max_chars:
        return serialized

    omitted = len(serialized) - max_chars
    return f"{serialized[:max_chars]}\n\n... [truncated {omitted} characters]"
