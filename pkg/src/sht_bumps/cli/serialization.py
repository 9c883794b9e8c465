"""JSON input formats of the command-line front end.

Young function: {"family": "power" | "scaledpower" | "powerlog" | "logbump" |
"product" | "dilated" | "conjugate", ...parameters}.
Step function: {"breakpoints": [...], "values": [...]}.
Point function: {"values": [...], "mass": [...]}.
Weight pair: {"u": <function>, "sigma": <function>, "floor"?: float,
"window"?: {"intervals": [[lo, hi], ...]}}.
Finite space: {"name"?: str, "dist": [[...]], "mass": [...]}.
Grid: the output of ``grid-build`` (``DyadicGrid.to_dict``).
Sparse family: {"cubes": [id, ...]} or the output of ``sparse-build``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Union

from ..core.bump import DEFAULT_FLOOR, WeightPair
from ..core.space import DyadicGrid, FiniteSpace
from ..core.sparse import SparseFamily
from ..core.stepfunctions import AnyFunction, IntervalSet, PointFunction, StepFunction
from ..core.young import YoungFunction, young_from_dict
from ..errors import DomainError


def read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise DomainError(f"input file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON in {Path(path).name}: {exc}") from exc


def parse_young(spec: Union[str, Dict[str, Any]]) -> YoungFunction:
    """A Young function from a dict, an inline JSON string, or a path to a JSON file."""
    if isinstance(spec, str):
        text = spec.strip()
        spec = json.loads(text) if text.startswith("{") else read_json(Path(text))
    return young_from_dict(spec)


def function_from_dict(data: Dict[str, Any]) -> AnyFunction:
    if not isinstance(data, dict):
        raise DomainError("a function must be a JSON object")
    if "breakpoints" in data:
        return StepFunction.from_dict(data)
    if "mass" in data:
        return PointFunction.from_dict(data)
    raise DomainError("a function needs either breakpoints (line) or mass (finite space)")


def load_function(path: Path) -> AnyFunction:
    return function_from_dict(read_json(path))


def load_pair(path: Path) -> WeightPair:
    data = read_json(path)
    try:
        u, sigma = function_from_dict(data["u"]), function_from_dict(data["sigma"])
    except (KeyError, TypeError) as exc:
        raise DomainError(f"weight pair {Path(path).name} needs u and sigma: {exc}") from exc
    window = None
    if data.get("window"):
        window = IntervalSet(tuple(tuple(p) for p in data["window"]["intervals"]))
    return WeightPair(u, sigma, float(data.get("floor", DEFAULT_FLOOR)), window)


def load_space(path: Path) -> FiniteSpace:
    return FiniteSpace.from_dict(read_json(path))


def load_grid(path: Path) -> DyadicGrid:
    return DyadicGrid.from_dict(read_json(path))


def family_ids(data: Dict[str, Any]) -> List[int]:
    try:
        return [int(c["id"]) if isinstance(c, dict) else int(c) for c in data["cubes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"invalid sparse family payload: {exc}") from exc


def load_family(path: Path, grid: DyadicGrid) -> SparseFamily:
    """Cube ids refer to ``grid``; witnesses are rebuilt and re-checked."""
    ids = family_ids(read_json(path))
    bad = [i for i in ids if not 0 <= i < len(grid.cubes)]
    if bad:
        raise DomainError(f"sparse family refers to cubes {bad[:5]} outside the grid")
    return SparseFamily.from_cubes(grid, ids)
