"""Run configuration: flat JSON file values overridden by command-line flags."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from ..errors import DomainError, ParameterError

logger = logging.getLogger(__name__)

COMMANDS = (
    "orlicz-norm",
    "bump-scan",
    "cz-decompose",
    "sparse-build",
    "sparse-apply",
    "grid-build",
    "grid-verify",
    "verify-thm",
    "counterexample",
    "hilbert",
)
THEOREM_TAGS = ("double", "separated", "weak11", "lemma61", "lsut", "maximal")
COUNTEREXAMPLE_MODES = ("build", "double", "separated")
BUMP_KINDS = ("double", "separated", "separated-dual")

_PATH_FIELDS = ("out", "weights", "function", "space", "grid", "family")
_ALIASES = {"tag": "mode", "kind": "mode", "lambda": "lam"}


@dataclass
class RunConfig:
    command: str
    mode: Optional[str] = None
    out: Optional[Path] = None
    weights: Optional[Path] = None
    function: Optional[Path] = None
    space: Optional[Path] = None
    grid: Optional[Path] = None
    family: Optional[Path] = None
    young: Optional[Union[str, Dict[str, Any]]] = None
    young_b: Optional[Union[str, Dict[str, Any]]] = None
    p: float = 2.0
    delta: float = 1.0
    epsilon: Optional[float] = None
    a: Optional[float] = None
    lam: Optional[float] = None
    q: float = 2.0
    eta: Optional[float] = None
    shifts: Tuple[float, ...] = (0.0,)
    k_min: int = 0
    k_max: int = 6
    points: int = 0
    seed: int = 0
    count: Optional[int] = None
    n_max: int = 30
    log_power: float = 3.0
    cell_width: Optional[float] = None
    workers: int = 1

    def validate(self) -> "RunConfig":
        """Reject out-of-domain parameters before anything is computed."""
        if self.command not in COMMANDS:
            raise ParameterError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.command == "verify-thm" and self.mode not in THEOREM_TAGS:
            raise ParameterError(f"verify-thm needs --tag in {THEOREM_TAGS}, got {self.mode!r}")
        if self.command == "counterexample" and self.mode not in COUNTEREXAMPLE_MODES:
            raise ParameterError(f"counterexample needs --mode in {COUNTEREXAMPLE_MODES}, got {self.mode!r}")
        if self.command == "bump-scan" and self.mode is None:
            self.mode = "double"
        if self.command == "bump-scan" and self.mode not in BUMP_KINDS:
            raise ParameterError(f"bump-scan needs --kind in {BUMP_KINDS}, got {self.mode!r}")
        if not (math.isfinite(self.p) and self.p > 1.0):
            raise ParameterError(f"p must be > 1, got {self.p}")
        if not (math.isfinite(self.delta) and self.delta > 0.0):
            raise ParameterError(f"delta must be > 0, got {self.delta}")
        if self.epsilon is not None and not 0.0 < self.epsilon < self.delta / self.p:
            raise ParameterError(f"epsilon must lie in (0, delta/p) = (0, {self.delta / self.p:.6g}), got {self.epsilon}")
        if self.a is not None and not self.a > 1.0:
            raise ParameterError(f"a must exceed 1, got {self.a}")
        if self.lam is not None and not (math.isfinite(self.lam) and self.lam > 0.0):
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        if not self.q >= 1.0:
            raise ParameterError(f"q must be >= 1, got {self.q}")
        if self.eta is not None and not 0.0 < self.eta < 1.0:
            raise ParameterError(f"eta must lie in (0, 1), got {self.eta}")
        if self.k_min > self.k_max:
            raise ParameterError(f"k_min={self.k_min} exceeds k_max={self.k_max}")
        if self.command == "counterexample" and self.n_max < 2:
            raise ParameterError(f"n_max must be >= 2, got {self.n_max}")
        if self.count is not None and self.count < 1:
            raise ParameterError(f"count must be positive, got {self.count}")
        if self.workers < 1:
            raise ParameterError(f"workers must be positive, got {self.workers}")
        if self.cell_width is not None and not self.cell_width > 0.0:
            raise ParameterError(f"cell width must be positive, got {self.cell_width}")
        return self

    def check_a(self, epsilon: float) -> float:
        """a for sparse families on a grid with mass ratio ε: default 4/ε, at least 2/ε."""
        if self.a is None:
            return 4.0 / epsilon
        if self.a < 2.0 / epsilon:
            raise ParameterError(f"a must be at least 2/epsilon = {2.0 / epsilon:.6g}, got {self.a}")
        return self.a

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        for name in _PATH_FIELDS:
            if payload[name] is not None:
                payload[name] = str(payload[name])
        payload["shifts"] = list(self.shifts)
        return payload


def read_config_file(path: Path) -> Dict[str, Any]:
    """Flat JSON object of RunConfig field values."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise DomainError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON in config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise DomainError(f"config file {path} must hold a JSON object")
    nested = sorted(k for k, v in data.items() if isinstance(v, dict) and k not in ("young", "young_b"))
    if nested:
        raise DomainError(f"config keys must be flat, found nested values for {nested}")
    return data


def build_config(command: str, file_values: Dict[str, Any], flag_values: Dict[str, Any]) -> RunConfig:
    """Merge file values with explicit flags (flags win), then validate."""
    known = {f.name for f in fields(RunConfig)} - {"command"}
    merged: Dict[str, Any] = {}
    unknown: List[str] = []
    for source in (file_values, {k: v for k, v in flag_values.items() if v is not None}):
        for key, value in source.items():
            key = _ALIASES.get(key, key.replace("-", "_"))
            if key in known:
                merged[key] = value
            else:
                unknown.append(key)
    for name in _PATH_FIELDS:
        if merged.get(name) is not None:
            merged[name] = Path(merged[name])
    if "shifts" in merged:
        merged["shifts"] = tuple(float(s) for s in merged["shifts"])
    if unknown:
        logger.debug("ignoring unknown config keys %s", sorted(set(unknown)))
    try:
        config = RunConfig(command=command, **merged)
    except TypeError as exc:
        raise DomainError(f"invalid configuration: {exc}") from exc
    return config.validate()
