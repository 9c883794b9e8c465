"""Seeded random instances: step functions, weight pairs and sparse families."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from ..core.bump import WeightPair
from ..core.space import DyadicGrid, FiniteSpace, line_grid
from ..core.sparse import SparseFamily, sparse_from_levels
from ..core.stepfunctions import IntervalSet, PointFunction, StepFunction

UNIT = (0.0, 1.0)


@dataclass(frozen=True)
class Instance:
    """Parameters of one randomized experiment; everything else derives from ``seed``."""

    seed: int
    p: float = 2.0
    level: int = 5
    oscillation: float = 1.0
    delta: float = 1.0

    @property
    def size(self) -> int:
        return 2 ** self.level


def dyadic_breakpoints(level: int, window: Tuple[float, float] = UNIT) -> np.ndarray:
    lo, hi = window
    return lo + (hi - lo) * np.arange(2 ** level + 1) / 2 ** level


def random_step_function(
    rng: np.random.Generator,
    level: int = 5,
    window: Tuple[float, float] = UNIT,
    zero_fraction: float = 0.3,
    scale: float = 1.0,
) -> StepFunction:
    """Nonnegative step function on the level-``level`` dyadic cells of the window."""
    n = 2 ** level
    values = scale * rng.lognormal(mean=0.0, sigma=1.0, size=n)
    values[rng.random(n) < zero_fraction] = 0.0
    if not np.any(values):
        values[rng.integers(n)] = scale
    return StepFunction(dyadic_breakpoints(level, window), values)


def random_weight(
    rng: np.random.Generator,
    level: int = 5,
    oscillation: float = 1.0,
    window: Tuple[float, float] = UNIT,
) -> StepFunction:
    """exp of a piecewise-constant Gaussian field; larger oscillation moves bumps toward divergence."""
    field = oscillation * rng.standard_normal(2 ** level)
    return StepFunction(dyadic_breakpoints(level, window), np.exp(field))


def random_weight_pair(
    rng: np.random.Generator,
    level: int = 5,
    oscillation: float = 1.0,
    window: Tuple[float, float] = UNIT,
) -> WeightPair:
    u = random_weight(rng, level, oscillation, window)
    sigma = random_weight(rng, level, oscillation, window)
    return WeightPair(u, sigma, window=IntervalSet.of(window))


def constant_pair(value: float = 1.0, window: Tuple[float, float] = UNIT) -> WeightPair:
    u = StepFunction(np.array(window, dtype=float), np.array([value]))
    return WeightPair(u, u, window=IntervalSet.of(window))


def random_point_function(rng: np.random.Generator, space: FiniteSpace, zero_fraction: float = 0.3) -> PointFunction:
    values = rng.lognormal(size=space.n_points)
    values[rng.random(space.n_points) < zero_fraction] = 0.0
    if not np.any(values):
        values[0] = 1.0
    return PointFunction(values, space.mass)


def instance_grid(instance: Instance) -> DyadicGrid:
    return line_grid(0.0, 0, instance.level)


def instance_family(instance: Instance, grid: Optional[DyadicGrid] = None) -> Tuple[DyadicGrid, SparseFamily]:
    """Grid and sparse family built from a random function of the instance's seed."""
    grid = grid or instance_grid(instance)
    rng = np.random.default_rng(instance.seed + 7919)
    f = random_step_function(rng, instance.level)
    return grid, sparse_from_levels(f, grid)


def seeded_instances(
    count: int,
    ps: Iterable[float] = (1.5, 2.0, 3.0),
    levels: Iterable[int] = (3, 4, 5),
    oscillation: float = 1.0,
    first_seed: int = 0,
) -> List[Instance]:
    """Deterministic sweep cycling through the exponents and sizes."""
    ps, levels = list(ps), list(levels)
    return [
        Instance(
            seed=first_seed + i,
            p=ps[i % len(ps)],
            level=levels[(i // len(ps)) % len(levels)],
            oscillation=oscillation,
        )
        for i in range(count)
    ]
