"""Experiment reports and their CSV / JSON renderings."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

import numpy as np
from scipy import stats

logger = logging.getLogger(__name__)

HEADER = (
    "Constants in the inequalities are not explicit: every check below is a boundedness or "
    "trend assertion over an instance suite, never a comparison with a fixed number."
)

T = TypeVar("T")
R = TypeVar("R")


def format_float(value: Any) -> Any:
    """17 significant digits for floats, everything else unchanged."""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def log_slope(sizes: Sequence[float], ratios: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log(ratio) against log(size); None without two distinct sizes."""
    pairs = [(s, r) for s, r in zip(sizes, ratios) if s > 0 and r > 0 and math.isfinite(r)]
    if len({s for s, _ in pairs}) < 2:
        return None
    x = np.log([s for s, _ in pairs])
    y = np.log([r for _, r in pairs])
    return float(stats.linregress(x, y).slope)


@dataclass
class NormExperimentReport:
    tag: str
    rows: List[Dict[str, Any]] = field(default_factory=list)
    checks: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def instances(self) -> int:
        return len({row.get("instance") for row in self.rows})

    @property
    def ratios(self) -> List[float]:
        return [float(row["ratio"]) for row in self.rows if row.get("ratio") is not None]

    @property
    def max_ratio(self) -> float:
        finite = [r for r in self.ratios if math.isfinite(r)]
        return max(finite) if finite else math.nan

    @property
    def slope(self) -> Optional[float]:
        return log_slope([row.get("size", 0) for row in self.rows], [row.get("ratio", math.nan) for row in self.rows])

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def summary(self) -> Dict[str, Any]:
        return _jsonable(
            {
                "tag": self.tag,
                "header": HEADER,
                "instances": self.instances,
                "rows": len(self.rows),
                "max_ratio": self.max_ratio,
                "slope": self.slope,
                "checks": self.checks,
                "passed": self.passed,
                "notes": self.notes,
                **self.extras,
            }
        )


def write_csv(path: Path, rows: Iterable[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> Path:
    rows = list(rows)
    if columns is None:
        columns = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: format_float(row.get(key, "")) for key in columns})
    logger.info("wrote %d rows to %s", len(rows), path)
    return path


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def run_suite(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """Map fn over items, in a process pool when workers > 1; results keep input order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def merge_reports(tag: str, parts: Iterable[NormExperimentReport]) -> NormExperimentReport:
    """Concatenate rows and notes in order; a check passes only if it passes in every part."""
    merged = NormExperimentReport(tag)
    for part in parts:
        merged.rows.extend(part.rows)
        merged.notes.extend(part.notes)
        for name, ok in part.checks.items():
            merged.checks[name] = merged.checks.get(name, True) and bool(ok)
    return merged
