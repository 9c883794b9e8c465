"""Double and separated bump constants over scan families of balls and cubes."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DomainError, ParameterError
from .orlicz import average, orlicz_norm
from .space import DyadicGrid, FiniteSpace, dilate, smallest_containing_cube, space_balls
from .stepfunctions import AnyFunction, IntervalSet, Region, StepFunction
from .young import YoungFunction

logger = logging.getLogger(__name__)

DEFAULT_FLOOR = 1e-12


def dual_exponent(p: float) -> float:
    if not (math.isfinite(p) and p > 1.0):
        raise DomainError(f"p must be a finite real > 1, got {p}")
    return p / (p - 1.0)


@dataclass(frozen=True, eq=False)
class WeightPair:
    """Weights (u, σ), floored at τ on the working window."""

    u: AnyFunction
    sigma: AnyFunction
    floor: float = DEFAULT_FLOOR
    window: Optional[IntervalSet] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.floor) and self.floor > 0.0):
            raise ParameterError(f"weight floor must be positive, got {self.floor}")
        u, sigma = self.u, self.sigma
        if isinstance(u, StepFunction):
            window = self.window or u.domain.union(sigma.domain)
            lo, hi = window.bounds
            u, sigma = u.floored(self.floor, lo, hi), sigma.floored(self.floor, lo, hi)
            object.__setattr__(self, "window", window)
        else:
            u, sigma = u.floored(self.floor), sigma.floored(self.floor)
        if np.any(u.values < 0.0) or np.any(sigma.values < 0.0):
            raise DomainError("weights must be nonnegative")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "sigma", sigma)

    def swapped(self) -> "WeightPair":
        return WeightPair(self.sigma, self.u, self.floor, self.window)

    def breakpoints(self) -> np.ndarray:
        if not isinstance(self.u, StepFunction):
            raise DomainError("breakpoints exist only for weights on the line")
        return np.union1d(self.u.breakpoints, self.sigma.breakpoints)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "u": self.u.to_dict(),
            "sigma": self.sigma.to_dict(),
            "floor": self.floor,
            "window": self.window.to_dict() if self.window is not None else None,
        }


@dataclass(frozen=True)
class ScanFamily:
    """The sets a bump supremum is taken over, with printable labels."""

    description: str
    regions: Tuple[Region, ...]
    labels: Tuple[Any, ...]

    def __len__(self) -> int:
        return len(self.regions)

    @classmethod
    def from_grid(cls, grid: DyadicGrid) -> "ScanFamily":
        return cls(
            f"{grid.kind} grid cubes (shift={grid.shift}, seed={grid.seed})",
            tuple(c.members for c in grid.cubes),
            tuple(f"cube:{c.id}" for c in grid.cubes),
        )

    @classmethod
    def from_points(cls, points: Sequence[float], refinements: int = 2, max_points: int = 64) -> "ScanFamily":
        """All intervals [x_i, x_j) with endpoints among the points, each gap split 2^m times."""
        base = np.unique(np.asarray(points, dtype=float))
        if base.size < 2:
            raise DomainError("an interval family needs at least two endpoints")
        fractions = np.arange(2 ** int(refinements)) / 2 ** int(refinements)
        starts = base[:-1, None] + np.diff(base)[:, None] * fractions[None, :]
        endpoints = np.unique(np.append(starts.ravel(), base[-1]))
        if endpoints.size > max_points:
            logger.info("interval family thinned from %d to %d endpoints", endpoints.size, max_points)
            keep = np.unique(np.round(np.linspace(0, endpoints.size - 1, max_points)).astype(int))
            endpoints = endpoints[keep]
        regions, labels = [], []
        for i in range(endpoints.size):
            for j in range(i + 1, endpoints.size):
                regions.append(IntervalSet.of((endpoints[i], endpoints[j])))
                labels.append((float(endpoints[i]), float(endpoints[j])))
        return cls(f"intervals on {endpoints.size} endpoints (m={refinements})", tuple(regions), tuple(labels))

    @classmethod
    def from_pair(cls, pair: WeightPair, refinements: int = 2, max_points: int = 64) -> "ScanFamily":
        lo, hi = pair.window.bounds
        points = pair.breakpoints()
        points = points[(points >= lo) & (points <= hi)]
        return cls.from_points(np.union1d(points, [lo, hi]), refinements, max_points)

    @classmethod
    def balls(cls, space: FiniteSpace) -> "ScanFamily":
        found = space_balls(space)
        return cls(f"balls of {space.name}", tuple(found), tuple(f"ball:{b.indices[:4]}" for b in found))

    def extended(self, other: "ScanFamily") -> "ScanFamily":
        return ScanFamily(
            f"{self.description} + {other.description}", self.regions + other.regions, self.labels + other.labels
        )


@dataclass(frozen=True)
class BumpReport:
    kind: str
    value: float
    extremal: Any
    family: str
    evaluated: int
    extremal_region: Optional[Region] = field(default=None, repr=False, compare=False)

    @property
    def diverges(self) -> bool:
        return math.isinf(self.value)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "value": self.value,
            "diverges": self.diverges,
            "extremal": self.extremal,
            "family": self.family,
            "evaluated": self.evaluated,
        }

    def csv_row(self) -> Dict[str, Any]:
        lo = hi = ""
        if isinstance(self.extremal_region, IntervalSet) and not self.extremal_region.is_empty:
            lo, hi = self.extremal_region.bounds
        return {"kind": self.kind, "value": self.value, "extremal_lo": lo, "extremal_hi": hi, "extremal": str(self.extremal)}


def scan_family(kind: str, family: ScanFamily, product: Callable[[Region], float]) -> BumpReport:
    if len(family) == 0:
        raise DomainError("scan family is empty")
    best, best_index, evaluated = -math.inf, None, 0
    for index, region in enumerate(family.regions):
        if not region.measure > 0.0:
            continue
        value = product(region)
        evaluated += 1
        if value > best:
            best, best_index = value, index
    if best_index is None:
        raise DomainError("every member of the scan family has measure zero")
    logger.debug("%s bump %.10g over %d sets (%s)", kind, best, evaluated, family.description)
    return BumpReport(kind, float(best), family.labels[best_index], family.description, evaluated, family.regions[best_index])


def bump_double(pair: WeightPair, A: YoungFunction, B: YoungFunction, p: float, family: ScanFamily) -> BumpReport:
    """[u,σ]_{A,B,p} = sup_Q ‖u^{1/p}‖_{A,Q}‖σ^{1/p'}‖_{B,Q}."""
    q = dual_exponent(p)
    u_root, s_root = pair.u.power(1.0 / p), pair.sigma.power(1.0 / q)
    return scan_family("double", family, lambda Q: orlicz_norm(u_root, Q, A) * orlicz_norm(s_root, Q, B))


def bump_double_uv(
    u: AnyFunction, v: AnyFunction, A: YoungFunction, B: YoungFunction, p: float, family: ScanFamily
) -> BumpReport:
    """[[u,v]]_{A,B,p} = sup_Q ‖u^{1/p}‖_{A,Q}‖v^{-1/p}‖_{B,Q}.

    With σ = v^{1-p'} this is [u,σ]_{A,B,p}, and ‖f‖_{L^p(v)} = ‖fσ^{-1}‖_{L^p(σ)}.
    v must be positive on every scanned set; cells where it vanishes stay at zero.
    """
    if np.any(v.values < 0.0):
        raise DomainError("weights must be nonnegative")
    with np.errstate(divide="ignore"):
        v_root = v.map(lambda x: np.where(x > 0.0, np.abs(x) ** (-1.0 / p), 0.0))
    u_root = u.power(1.0 / p)
    return scan_family("double-uv", family, lambda Q: orlicz_norm(u_root, Q, A) * orlicz_norm(v_root, Q, B))


def bump_separated(pair: WeightPair, A: YoungFunction, p: float, family: ScanFamily, kind: str = "separated-A") -> BumpReport:
    """[u,σ]_{A,p} = sup_Q ‖u^{1/p}‖_{A,Q}‖σ^{1/p'}‖_{p',Q}."""
    q = dual_exponent(p)
    u_root = pair.u.power(1.0 / p)
    return scan_family(kind, family, lambda Q: orlicz_norm(u_root, Q, A) * average(pair.sigma, Q) ** (1.0 / q))


def bump_separated_dual(pair: WeightPair, B: YoungFunction, p: float, family: ScanFamily) -> BumpReport:
    """[σ,u]_{B,p'}: the separated bump with the roles of the weights exchanged."""
    return bump_separated(pair.swapped(), B, dual_exponent(p), family, kind="separated-B")


@dataclass(frozen=True)
class EquivalenceReport:
    """Ball and dyadic suprema of a bump constant.

    ``dyadic_over_ball`` compares with the given balls only. The band is
    guaranteed against ``extended_sup``, the supremum over the balls together
    with the dilates of every grid cube, so ``within_band`` uses
    ``dyadic_over_extended``.
    """

    ball_sup: float
    extended_sup: float
    dyadic_sup: float
    ball_over_dyadic: float
    dyadic_over_ball: float
    dyadic_over_extended: float
    band: float
    per_grid: Tuple[float, ...]

    @property
    def within_band(self) -> bool:
        return self.ball_over_dyadic <= self.band * (1.0 + 1e-9) and self.dyadic_over_extended <= self.band * (1.0 + 1e-9)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ball_sup": self.ball_sup,
            "extended_sup": self.extended_sup,
            "dyadic_sup": self.dyadic_sup,
            "ball_over_dyadic": self.ball_over_dyadic,
            "dyadic_over_ball": self.dyadic_over_ball,
            "dyadic_over_extended": self.dyadic_over_extended,
            "band": self.band,
            "within_band": self.within_band,
            "per_grid": list(self.per_grid),
        }


def _ratio(a: float, b: float) -> float:
    if b > 0.0:
        return a / b
    return 1.0 if a == 0.0 else math.inf


def ball_dyadic_equivalence(
    pair: WeightPair,
    A: YoungFunction,
    p: float,
    grids: Sequence[DyadicGrid],
    balls: ScanFamily,
) -> EquivalenceReport:
    """Compare the ball supremum of [u,σ]_{A,p} with the supremum over the grids.

    Each ball B lies in a cube Q with μ(Q) ≤ κμ(B), and each cube lies in its
    dilate with the same kind of ratio; convexity of A turns both into norm
    comparisons with constant κ·κ^{1/p'} ≤ κ². The band is the largest κ².
    """
    if not grids:
        raise DomainError("ball/dyadic comparison needs at least one grid")
    per_grid = tuple(bump_separated(pair, A, p, ScanFamily.from_grid(g)).value for g in grids)
    dyadic_sup = max(per_grid)

    kappa = 1.0
    for region in balls.regions:
        size = region.measure
        if not size > 0.0:
            continue
        found = smallest_containing_cube(grids, region)
        kappa = max(kappa, found[1].measure / size if found is not None else math.inf)
    dilates: List[Region] = []
    labels: List[Any] = []
    for g_index, grid in enumerate(grids):
        for cube in grid.cubes:
            ball = dilate(grid, cube, 1.0)
            kappa = max(kappa, _ratio(ball.measure, cube.measure))
            dilates.append(ball)
            labels.append(f"dilate:{g_index}:{cube.id}")
    ball_sup = bump_separated(pair, A, p, balls).value
    extended_sup = max(ball_sup, bump_separated(pair, A, p, ScanFamily("cube dilates", tuple(dilates), tuple(labels))).value)
    report = EquivalenceReport(
        ball_sup=ball_sup,
        extended_sup=extended_sup,
        dyadic_sup=dyadic_sup,
        ball_over_dyadic=_ratio(ball_sup, dyadic_sup),
        dyadic_over_ball=_ratio(dyadic_sup, ball_sup),
        dyadic_over_extended=_ratio(dyadic_sup, extended_sup),
        band=kappa * kappa,
        per_grid=per_grid,
    )
    logger.info(
        "ball/dyadic: %.6g / %.6g (%.6g against dilates), band %.4g",
        report.ball_over_dyadic, report.dyadic_over_ball, report.dyadic_over_extended, report.band,
    )
    return report
