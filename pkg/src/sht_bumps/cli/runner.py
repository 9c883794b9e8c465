"""Command-line entry point: argument parsing, run directories and exit codes."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from ..errors import InvariantError, ToolkitError
from ..experiments.reports import HEADER, write_csv, write_json
from ..paths import resolve_results_root
from .commands import HANDLERS, CommandResult
from .config import BUMP_KINDS, COUNTEREXAMPLE_MODES, THEOREM_TAGS, RunConfig, build_config, read_config_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INPUT = 2

LOG_LEVEL_ENV = "SHT_BUMPS_LOG_LEVEL"

_COLUMNS = {
    "orlicz-norm": "norm.csv: young, measure, average, norm, lp_average (Power only)",
    "bump-scan": "bump.csv: kind, value, extremal_lo, extremal_hi, extremal",
    "cz-decompose": "cubes.csv: cube, generation, measure, average; good_part.csv: left, right, value (or point, mass, value)",
    "sparse-build": "family.csv: cube, generation, level, measure, witness_measure; family.json for sparse-apply",
    "sparse-apply": "output.csv: left, right, value (or point, mass, value)",
    "grid-build": "generations.csv: generation, cubes, min_measure, max_measure; grid.json",
    "grid-verify": "properties.csv: property, ok",
    "verify-thm": "<tag>.csv: instance, size, lhs, rhs, ratio and per-tag columns",
    "counterexample": "blocks.csv (build): n, K, I/J endpoints, gap_log; double.csv: n, product, ratio = product/log(e+n), ...; "
    "separated.csv: n, block_sup_A, block_sup_B, running sups, long-interval bound ratios",
    "hilbert": "transform.csv: left, right, value, collar; hilbert.csv (suite): instance, lhs, rhs, ratio",
}


def configure_logging(level: Optional[str] = None) -> None:
    name = (level or os.getenv(LOG_LEVEL_ENV) or "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Flat JSON file of run settings; flags override it")
    common.add_argument("--out", type=Path, help="Run directory (default: results root / command-mode-seed)")
    common.add_argument("--log-level", help=f"Logging level (default from {LOG_LEVEL_ENV}, else WARNING)")
    common.add_argument("--weights", type=Path, help="Weight pair JSON {u, sigma}")
    common.add_argument("--function", type=Path, help="Step or point function JSON")
    common.add_argument("--space", type=Path, help="Finite space JSON {dist, mass}")
    common.add_argument("--grid", type=Path, help="Grid JSON written by grid-build")
    common.add_argument("--family", type=Path, help="Sparse family JSON written by sparse-build")
    common.add_argument("--young", help="Young function as inline JSON or a path")
    common.add_argument("--young-b", help="Second Young function for double bumps")
    common.add_argument("--p", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--a", type=float, help="Level base of sparse families (at least 2/epsilon)")
    common.add_argument("--lambda", dest="lam", type=float, help="Stopping height")
    common.add_argument("--q", type=float)
    common.add_argument("--eta", type=float)
    common.add_argument("--shifts", type=float, nargs="+")
    common.add_argument("--k-min", type=int)
    common.add_argument("--k-max", type=int)
    common.add_argument("--points", type=int, help="Random plane space size for grid-build")
    common.add_argument("--seed", type=int)
    common.add_argument("--count", type=int, help="Instances per suite")
    common.add_argument("--n-max", type=int)
    common.add_argument("--log-power", type=float)
    common.add_argument("--cell-width", type=float)
    common.add_argument("--workers", type=int)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sht-bumps", description="Dyadic bump and sparse-operator experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_arguments()
    for name in HANDLERS:
        command = sub.add_parser(name, parents=[common], help=_COLUMNS[name].split(":")[0], epilog=f"CSV columns: {_COLUMNS[name]}")
        if name == "verify-thm":
            command.add_argument("--tag", dest="mode", choices=THEOREM_TAGS, required=True)
        elif name == "counterexample":
            command.add_argument("--mode", dest="mode", choices=COUNTEREXAMPLE_MODES, required=True)
        elif name == "bump-scan":
            command.add_argument("--kind", dest="mode", choices=BUMP_KINDS, default=None)
    dashboard = sub.add_parser("dashboard", help="Browse run directories in a Dash app")
    dashboard.add_argument("--results-root", type=Path)
    dashboard.add_argument("--host", default="0.0.0.0", help="Bind host")
    dashboard.add_argument("--port", type=int, default=8050, help="Bind port")
    dashboard.add_argument("--debug", action="store_true", help="Enable Dash debug mode")
    return parser


def run_directory(config: RunConfig) -> Path:
    if config.out is not None:
        return config.out
    label = config.command if config.mode is None else f"{config.command}-{config.mode}"
    return resolve_results_root() / f"{label}-seed{config.seed}"


def write_artifacts(out: Path, config: RunConfig, result: CommandResult, status: Dict[str, Any]) -> List[Dict[str, Any]]:
    """Tables as CSV, documents as JSON, then summary.json and manifest.json."""
    files: List[Dict[str, Any]] = []
    for name, rows in result.tables.items():
        write_csv(out / f"{name}.csv", rows)
        files.append({"name": name, "path": f"{name}.csv", "kind": "csv", "rows": len(rows)})
    for name, payload in result.documents.items():
        write_json(out / name, payload)
        files.append({"name": Path(name).stem, "path": name, "kind": "json"})
    write_json(out / "summary.json", {"header": HEADER, **status, "summary": result.summary, "witness": result.witness})
    files.append({"name": "summary", "path": "summary.json", "kind": "json"})
    write_json(out / "manifest.json", {"command": config.command, "mode": config.mode, "config": config.to_dict(), "files": files})
    return files


def run(config: RunConfig) -> int:
    """Execute one configured command; 0 on success, 1 on a failed assertion, 2 on bad input."""
    out = run_directory(config)
    handler = HANDLERS[config.command]
    try:
        result = handler(config)
    except InvariantError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        status = {"exit_code": EXIT_ASSERTION, "error": f"assertion failed: {exc}"}
        write_artifacts(out, config, CommandResult(witness=exc.witness), status)
        return EXIT_ASSERTION
    except (ToolkitError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        try:
            write_artifacts(out, config, CommandResult(), {"exit_code": EXIT_INPUT, "error": f"input error: {exc}"})
        except OSError:
            logger.warning("could not write the run directory %s", out)
        return EXIT_INPUT

    code = EXIT_OK if result.passed else EXIT_ASSERTION
    write_artifacts(out, config, result, {"exit_code": code, "passed": result.passed})
    if result.message:
        print(result.message)
    if not result.passed:
        print(f"assertion failed, see {out / 'summary.json'}", file=sys.stderr)
    logger.info("%s finished with exit code %d in %s", config.command, code, out)
    return code


def _run_dashboard(args: argparse.Namespace) -> int:
    from ..app import create_dash_app

    app = create_dash_app(args.results_root)
    app.run(host=args.host, port=args.port, debug=args.debug)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(getattr(args, "log_level", None))
    if args.command == "dashboard":
        return _run_dashboard(args)

    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "log_level")}
    try:
        file_values = read_config_file(args.config) if args.config is not None else {}
        config = build_config(args.command, file_values, flags)
    except (ToolkitError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(config)
