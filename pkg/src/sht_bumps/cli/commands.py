"""One handler per subcommand; each returns tables, documents and a summary."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..core.bump import ScanFamily, bump_double, bump_separated, bump_separated_dual
from ..core.orlicz import average, lp_average, orlicz_norm
from ..core.space import RESOLVING_LIMIT, DyadicGrid, finite_grid, line_grid, random_plane_space, resolving_generation, verify_grid
from ..core.sparse import cz_decompose, l2_ratio, maximal_dominated_by_sparse, sparse_apply, sparse_from_levels
from ..core.stepfunctions import AnyFunction, PointFunction, PointSet, StepFunction
from ..core.young import LINEAR, Power, young_diagnostics
from ..errors import DomainError
from ..experiments import counterexample as cx
from ..experiments.hilbert import hilbert_apply, hilbert_suite
from ..experiments.theorems import SUITES, log_bump_pair
from .config import RunConfig
from .serialization import load_family, load_function, load_grid, load_pair, load_space, parse_young

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    documents: Dict[str, Any] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    passed: bool = True
    witness: Optional[Dict[str, Any]] = None
    message: str = ""


def _require(config: RunConfig, name: str) -> Any:
    value = getattr(config, name)
    if value is None:
        raise DomainError(f"{config.command} needs --{name.replace('_', '-')}")
    return value


def _everything(f: AnyFunction):
    if isinstance(f, PointFunction):
        return PointSet(tuple(range(f.values.size)), f.mass)
    return f.domain


def _grid_for(config: RunConfig, f: Optional[AnyFunction] = None) -> Tuple[DyadicGrid, bool]:
    """The grid from --grid, else one built from the config; the flag says whether it was built here."""
    if config.grid is not None:
        return load_grid(config.grid), False
    if config.space is not None or isinstance(f, PointFunction):
        space = load_space(_require(config, "space"))
        return finite_grid(space, config.eta, config.seed), True
    if not isinstance(f, StepFunction):
        return line_grid(config.shifts[0], config.k_min, config.k_max), True
    k_max = config.k_max
    if config.shifts[0] == 0.0:
        depth = resolving_generation(f.jumps(), config.k_max)
        if depth is None:
            logger.warning("breakpoints of f need generations beyond %d; keeping k_max=%d", RESOLVING_LIMIT, k_max)
        elif depth > k_max:
            logger.info("refining the line grid from k_max=%d to %d to resolve f", k_max, depth)
            k_max = depth
    return line_grid(config.shifts[0], config.k_min, k_max, window=f.domain), True


def _function_rows(f: AnyFunction) -> List[Dict[str, Any]]:
    if isinstance(f, PointFunction):
        return [{"point": i, "mass": m, "value": v} for i, (m, v) in enumerate(zip(f.mass, f.values))]
    return [{"left": lo, "right": hi, "value": v} for lo, hi, v in zip(f.lefts, f.rights, f.values)]


def orlicz_norm_command(config: RunConfig) -> CommandResult:
    f = load_function(_require(config, "function"))
    A = parse_young(config.young) if config.young is not None else Power(config.p)
    region = _everything(f)
    norm = orlicz_norm(f, region, A)
    row: Dict[str, Any] = {"young": A.describe(), "measure": region.measure, "average": average(abs(f), region), "norm": norm}
    if isinstance(A, Power):
        row["lp_average"] = lp_average(f, region, A.p)
    return CommandResult(
        tables={"norm": [row]},
        summary={"norm": norm, "young": A.to_dict(), "diagnostics": young_diagnostics(A)},
        message=format(norm, ".17g"),
    )


def bump_scan_command(config: RunConfig) -> CommandResult:
    pair = load_pair(_require(config, "weights"))
    if config.grid is not None:
        family = ScanFamily.from_grid(load_grid(config.grid))
    elif isinstance(pair.u, PointFunction):
        family = ScanFamily.balls(load_space(_require(config, "space")))
    else:
        family = ScanFamily.from_pair(pair)
        for shift in config.shifts:
            family = family.extended(ScanFamily.from_grid(line_grid(shift, config.k_min, config.k_max, window=pair.window)))
    default_a, default_b = log_bump_pair(config.p, config.delta)
    A = parse_young(config.young) if config.young is not None else default_a
    B = parse_young(config.young_b) if config.young_b is not None else default_b
    if config.mode == "double":
        report = bump_double(pair, A, B, config.p, family)
    elif config.mode == "separated":
        report = bump_separated(pair, A, config.p, family)
    else:
        report = bump_separated_dual(pair, B, config.p, family)
    return CommandResult(tables={"bump": [report.csv_row()]}, summary=report.to_dict(), message=format(report.value, ".17g"))


def cz_decompose_command(config: RunConfig) -> CommandResult:
    f = load_function(_require(config, "function"))
    grid, built = _grid_for(config, f)
    lam = config.lam if config.lam is not None else 2.0 * average(abs(f), grid.extent)
    decomposition = cz_decompose(f, grid, lam)
    rows = [
        {"cube": i, "generation": grid.cubes[i].generation, "measure": grid.cubes[i].measure, "average": mean}
        for i, mean in zip(decomposition.cubes, decomposition.averages)
    ]
    max_g = float(np.max(np.abs(decomposition.g.values))) if decomposition.g.values.size else 0.0
    summary = {
        "lambda": lam,
        "cubes": len(rows),
        "max_g": max_g,
        "constant": max(1.0, 1.0 / grid.epsilon),
        "g_over_lambda": max_g / lam,
    }
    documents = {"grid.json": grid.to_dict()} if built else {}
    return CommandResult(tables={"cubes": rows, "good_part": _function_rows(decomposition.g)}, documents=documents, summary=summary)


def sparse_build_command(config: RunConfig) -> CommandResult:
    f = load_function(_require(config, "function"))
    grid, built = _grid_for(config, f)
    a = config.check_a(grid.epsilon)
    Phi = parse_young(config.young) if config.young is not None else LINEAR
    family = sparse_from_levels(f, grid, Phi, a)
    rows = [
        {
            "cube": i,
            "generation": grid.cubes[i].generation,
            "level": family.levels.get(i),
            "measure": grid.cubes[i].measure,
            "witness_measure": family.witness[i].measure,
        }
        for i in family.cubes
    ]
    summary: Dict[str, Any] = {"a": a, "cubes": len(family), "young": Phi.to_dict()}
    if Phi is LINEAR:
        domination = maximal_dominated_by_sparse(f, grid, a)
        summary.update({"domination_holds": domination.holds, "max_violation": domination.max_violation})
    documents = {"family.json": family.to_dict()}
    if built:
        documents["grid.json"] = grid.to_dict()
    return CommandResult(tables={"family": rows}, documents=documents, summary=summary, passed=summary.get("domination_holds", True))


def sparse_apply_command(config: RunConfig) -> CommandResult:
    f = load_function(_require(config, "function"))
    grid = load_grid(_require(config, "grid"))
    family = load_family(_require(config, "family"), grid)
    out = sparse_apply(family, f)
    return CommandResult(
        tables={"output": _function_rows(out)},
        summary={"cubes": len(family), "l2_ratio": l2_ratio(family, f), "integral": out.integral()},
    )


def grid_build_command(config: RunConfig) -> CommandResult:
    if config.space is not None:
        grid = finite_grid(load_space(config.space), config.eta, config.seed)
    elif config.points > 0:
        grid = finite_grid(random_plane_space(config.points, seed=config.seed, random_mass=True), config.eta, config.seed)
    else:
        grid = line_grid(config.shifts[0], config.k_min, config.k_max)
    rows = []
    for k in sorted(grid.generations):
        measures = [c.measure for c in grid.generation(k)]
        rows.append({"generation": k, "cubes": len(measures), "min_measure": min(measures), "max_measure": max(measures)})
    report = verify_grid(grid)
    return CommandResult(
        tables={"generations": rows},
        documents={"grid.json": grid.to_dict()},
        summary={"kind": grid.kind, "cubes": len(grid.cubes), "verification": report.to_dict()},
        passed=report.passed,
        witness=report.witnesses or None,
    )


def grid_verify_command(config: RunConfig) -> CommandResult:
    report = verify_grid(load_grid(_require(config, "grid")))
    rows = [{"property": name, "ok": ok} for name, ok in report.properties.items()]
    failed = sorted(name for name, ok in report.properties.items() if not ok)
    return CommandResult(
        tables={"properties": rows},
        summary=report.to_dict(),
        passed=report.passed,
        witness=report.witnesses or None,
        message="all grid properties hold" if report.passed else f"violated: {', '.join(failed)}",
    )


def verify_thm_command(config: RunConfig) -> CommandResult:
    tag = config.mode
    kwargs: Dict[str, Any] = {"seed": config.seed, "workers": config.workers}
    if config.count is not None:
        kwargs["count"] = config.count
    if tag in ("double", "separated", "lemma61"):
        kwargs["delta"] = config.delta
    if tag == "lemma61":
        kwargs["epsilon"] = config.epsilon
    if tag == "weak11":
        kwargs["q"] = config.q
        if config.young is not None:
            kwargs["Phi"] = parse_young(config.young)
    report = SUITES[tag](**kwargs)
    failed = sorted(name for name, ok in report.checks.items() if not ok)
    return CommandResult(
        tables={tag: report.rows},
        summary=report.summary(),
        passed=report.passed,
        witness={"failed_checks": failed, "notes": report.notes} if failed else None,
        message=f"{tag}: max ratio {report.max_ratio:.6g}, passed={report.passed}",
    )


def counterexample_command(config: RunConfig) -> CommandResult:
    phi = parse_young(config.young) if config.young is not None else None
    ce = cx.counterexample_build(config.n_max, config.log_power, phi)
    if config.mode == "build":
        rows = [ce.block_row(n) for n in cx.block_samples(ce.n_max)]
        return CommandResult(tables={"blocks": rows}, summary=ce.to_dict(), passed=all(r["gap_ok"] for r in rows))
    series = cx.counterexample_scan(ce, config.mode)
    report = series.report
    failed = sorted(name for name, ok in report.checks.items() if not ok)
    return CommandResult(
        tables={config.mode: report.rows},
        summary=report.summary(),
        passed=report.passed,
        witness={"failed_checks": failed} if failed else None,
        message=f"{config.mode}: {len(series.series)} blocks, passed={report.passed}",
    )


def hilbert_command(config: RunConfig) -> CommandResult:
    if config.function is None:
        kwargs: Dict[str, Any] = {"seed": config.seed, "workers": config.workers, "delta": config.delta}
        if config.count is not None:
            kwargs["count"] = config.count
        report = hilbert_suite(**kwargs)
        return CommandResult(tables={"hilbert": report.rows}, summary=report.summary(), passed=report.passed)
    f = load_function(config.function)
    if not isinstance(f, StepFunction):
        raise DomainError("the Hilbert transform is defined for step functions on the line")
    result = hilbert_apply(f, cell_width=config.cell_width)
    values = result.values
    inside = result.collar.contains(0.5 * (values.lefts + values.rights))
    rows = [
        {"left": lo, "right": hi, "value": v, "collar": bool(c)}
        for lo, hi, v, c in zip(values.lefts, values.rights, values.values, inside)
    ]
    return CommandResult(
        tables={"transform": rows},
        summary={"cell_width": result.cell_width, "cells": len(rows), "collar_measure": result.collar.measure},
    )


HANDLERS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    "orlicz-norm": orlicz_norm_command,
    "bump-scan": bump_scan_command,
    "cz-decompose": cz_decompose_command,
    "sparse-build": sparse_build_command,
    "sparse-apply": sparse_apply_command,
    "grid-build": grid_build_command,
    "grid-verify": grid_verify_command,
    "verify-thm": verify_thm_command,
    "counterexample": counterexample_command,
    "hilbert": hilbert_command,
}
