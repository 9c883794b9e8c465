"""Calderón–Zygmund stopping cubes, sparse families and sparse operators."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import CoverageError, InvariantError, ParameterError, PreconditionError
from .orlicz import average, orlicz_norm
from .space import Cube, DyadicGrid
from .stepfunctions import AnyFunction, IntervalSet, PointFunction, PointSet, Region, StepFunction
from .young import LINEAR, YoungFunction, is_linear

logger = logging.getLogger(__name__)

_REL_TOL = 1e-12


def _check_coverage(f: AnyFunction, grid: DyadicGrid) -> None:
    if grid.kind == "line":
        if not isinstance(f, StepFunction):
            raise CoverageError("line grids act on step functions")
        outside = f.support().difference(grid.extent)
        if outside.measure > 0.0:
            raise CoverageError(f"grid window {grid.extent.intervals} misses part of the support: {outside.intervals}")
    elif not isinstance(f, PointFunction) or f.values.size != grid.space.n_points:
        raise CoverageError("function does not live on the grid's finite space")


def cube_norms(f: AnyFunction, grid: DyadicGrid, Phi: YoungFunction = LINEAR) -> np.ndarray:
    """‖f‖_{Φ,Q} for every cube, indexed by cube id."""
    _check_coverage(f, grid)
    magnitude = abs(f)
    if is_linear(Phi):
        return np.array([Phi.c * average(magnitude, c.members) for c in grid.cubes])
    return np.array([orlicz_norm(magnitude, c.members, Phi) for c in grid.cubes])


def _propagate_max(grid: DyadicGrid, per_cube: np.ndarray) -> np.ndarray:
    running = np.array(per_cube, dtype=float)
    for k in sorted(grid.generations)[1:]:
        for i in grid.generations[k]:
            parent = grid.cubes[i].parent
            if parent is not None:
                running[i] = max(running[i], running[parent])
    return running


def _leaf_function(grid: DyadicGrid, per_cube: np.ndarray) -> AnyFunction:
    """Function equal to per_cube[leaf] on each finest cube, zero off the grid."""
    leaves = grid.leaves()
    if grid.kind == "finite":
        values = np.zeros(grid.space.n_points)
        for leaf in leaves:
            values[leaf.members.index_array] = per_cube[leaf.id]
        return PointFunction(values, grid.space.mass)
    cells = sorted((leaf.interval, per_cube[leaf.id]) for leaf in leaves)
    breakpoints: List[float] = []
    values: List[float] = []
    for (lo, hi), value in cells:
        if breakpoints and lo > breakpoints[-1]:
            values.append(0.0)
            breakpoints.append(lo)
        if not breakpoints:
            breakpoints.append(lo)
        values.append(float(value))
        breakpoints.append(hi)
    return StepFunction(np.array(breakpoints), np.array(values))


def dyadic_maximal(f: AnyFunction, grid: DyadicGrid, Phi: YoungFunction = LINEAR) -> AnyFunction:
    """M_Φ^D f(x) = sup over grid cubes Q ∋ x of ‖f‖_{Φ,Q}; constant on finest cubes."""
    return _leaf_function(grid, _propagate_max(grid, cube_norms(f, grid, Phi)))


def _finite_level(f: AnyFunction, grid: DyadicGrid) -> float:
    return average(abs(f), grid.extent)


def _select(grid: DyadicGrid, norms: np.ndarray, lam: float) -> List[Cube]:
    selected: List[Cube] = []
    stack = list(reversed(grid.top()))
    while stack:
        cube = stack.pop()
        if norms[cube.id] > lam:
            selected.append(cube)
        else:
            stack.extend(grid.cubes[i] for i in reversed(cube.children))
    return selected


def _union(grid: DyadicGrid, cubes: Iterable[Cube]) -> Region:
    cubes = list(cubes)
    if grid.kind == "line":
        return IntervalSet(tuple(pair for c in cubes for pair in c.members.intervals))
    return PointSet(tuple(i for c in cubes for i in c.members.indices), grid.space.mass)


def cz_cubes(
    f: AnyFunction,
    grid: DyadicGrid,
    Phi: YoungFunction = LINEAR,
    lam: float = 1.0,
    norms: Optional[np.ndarray] = None,
) -> List[Cube]:
    """Maximal cubes with ‖f‖_{Φ,Q} > λ.

    Every selected cube with a parent satisfies λ < ‖f‖_{Φ,Q} ≤ λ/ε, using
    ‖f‖_{Φ,Q} ≤ (μ(P)/μ(Q))‖f‖_{Φ,P} for convex Φ.
    """
    if not (math.isfinite(lam) and lam > 0.0):
        raise ParameterError(f"lambda must be positive, got {lam}")
    norms = cube_norms(f, grid, Phi) if norms is None else norms
    level = _finite_level(f, grid)
    if lam < level:
        raise PreconditionError(f"lambda={lam:.6g} is below the average {level:.6g} of |f| over the space")
    selected = _select(grid, norms, lam)
    bound = lam / grid.epsilon
    for cube in selected:
        if cube.parent is not None and norms[cube.id] > bound * (1.0 + 1e-9):
            raise InvariantError(
                "stopping cube exceeds the lambda/epsilon bound",
                {"cube": cube.id, "norm": float(norms[cube.id]), "bound": bound},
            )
    if selected:
        logger.debug(
            "%d stopping cubes at lambda=%.6g, achieved constant %.4g",
            len(selected), lam, max(norms[c.id] for c in selected) / lam,
        )
    return selected


@dataclass(frozen=True, eq=False)
class SparseFamily:
    """Cubes S with pairwise disjoint E(Q) ⊆ Q and μ(Q) ≤ 2μ(E(Q))."""

    grid: DyadicGrid = field(repr=False)
    cubes: Tuple[int, ...]
    witness: Dict[int, Region] = field(repr=False)
    levels: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.check()

    def __len__(self) -> int:
        return len(self.cubes)

    def members(self) -> List[Cube]:
        return [self.grid.cubes[i] for i in self.cubes]

    def check(self) -> None:
        for i in self.cubes:
            cube = self.grid.cubes[i]
            E = self.witness[i]
            if not E.issubset(cube.members, tol=_REL_TOL * cube.measure):
                raise InvariantError("witness set leaves its cube", {"cube": i})
            if cube.measure > 2.0 * E.measure * (1.0 + _REL_TOL):
                raise InvariantError(
                    "sparseness fails", {"cube": i, "cube_measure": cube.measure, "witness_measure": E.measure}
                )
        witnesses = [self.witness[i] for i in self.cubes]
        if not witnesses:
            return
        total = sum(E.measure for E in witnesses)
        union = _union_regions(witnesses)
        if total > union.measure * (1.0 + _REL_TOL) + _REL_TOL:
            for a in range(len(self.cubes)):
                for b in range(a + 1, len(self.cubes)):
                    if witnesses[a].intersection(witnesses[b]).measure > 0.0:
                        raise InvariantError(
                            "witness sets overlap", {"cubes": [self.cubes[a], self.cubes[b]]}
                        )

    @classmethod
    def from_cubes(cls, grid: DyadicGrid, cube_ids: Iterable[int]) -> "SparseFamily":
        """E(Q) = Q minus the family cubes strictly inside Q."""
        ids = tuple(dict.fromkeys(int(i) for i in cube_ids))
        chosen = set(ids)
        witness: Dict[int, Region] = {}
        for i in ids:
            cube = grid.cubes[i]
            inner = [d for d in grid.descendants(cube) if d.id in chosen]
            witness[i] = cube.members.difference(_union(grid, inner)) if inner else cube.members
        return cls(grid, ids, witness)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cubes": [
                {
                    "id": i,
                    "generation": self.grid.cubes[i].generation,
                    "level": self.levels.get(i),
                    "witness": self.witness[i].to_dict(),
                }
                for i in self.cubes
            ]
        }


def _union_regions(regions: Sequence[Region]) -> Region:
    head = regions[0]
    if isinstance(head, IntervalSet):
        return IntervalSet(tuple(pair for r in regions for pair in r.intervals))
    return PointSet(tuple(i for r in regions for i in r.indices), head.mass)


def _levels(threshold: float, top: float, a: float) -> List[int]:
    """Exponents k with threshold ≤ a^k < top."""
    if top <= threshold:
        return []
    k = math.ceil(math.log(threshold) / math.log(a))
    while a ** (k - 1) >= threshold:
        k -= 1
    while a ** k < threshold:
        k += 1
    out = []
    while a ** k < top:
        out.append(k)
        k += 1
    return out


def sparse_threshold(f: AnyFunction, grid: DyadicGrid, norms: np.ndarray) -> float:
    """Lowest admissible level: ⨍_X|f| and the norms of the top cubes."""
    top = max(norms[c.id] for c in grid.top())
    return max(_finite_level(f, grid), float(top))


def sparse_from_levels(
    f: AnyFunction,
    grid: DyadicGrid,
    Phi: YoungFunction = LINEAR,
    a: Optional[float] = None,
) -> SparseFamily:
    """Stopping cubes at the levels a^k with witnesses E(Q) = Q \\ Ω_{k+1}.

    A cube met at several levels is kept once, at its highest level.
    """
    epsilon = grid.epsilon
    a = 4.0 / epsilon if a is None else float(a)
    if not a >= 2.0 / epsilon:
        raise ParameterError(f"a must be at least 2/epsilon = {2.0 / epsilon:.6g}, got {a}")
    norms = cube_norms(f, grid, Phi)
    if not np.any(norms > 0.0):
        return SparseFamily(grid, (), {})
    threshold = sparse_threshold(f, grid, norms)
    exponents = _levels(threshold, float(norms.max()), a)

    stopping = {k: cz_cubes(f, grid, Phi, a ** k, norms=norms) for k in exponents}
    highest: Dict[int, int] = {}
    for k in exponents:
        for cube in stopping[k]:
            highest[cube.id] = k
    witness: Dict[int, Region] = {}
    for cube_id, k in highest.items():
        cube = grid.cubes[cube_id]
        above = stopping.get(k + 1, [])
        witness[cube_id] = cube.members.difference(_union(grid, above)) if above else cube.members
    ordered = tuple(sorted(highest, key=lambda i: (highest[i], i)))
    family = SparseFamily(grid, ordered, witness, dict(highest))
    logger.info("sparse family: %d cubes over %d levels (a=%.4g)", len(family), len(exponents), a)
    return family


@dataclass(frozen=True, eq=False)
class CZDecomposition:
    lam: float
    cubes: Tuple[int, ...]
    g: AnyFunction
    b_parts: Tuple[AnyFunction, ...]
    averages: Tuple[float, ...]

    @property
    def b(self) -> AnyFunction:
        total = self.g - self.g
        for part in self.b_parts:
            total = total + part
        return total


def _max_abs(fn: AnyFunction) -> float:
    return float(np.max(np.abs(fn.values))) if fn.values.size else 0.0


def unresolved_cells(f: AnyFunction, grid: DyadicGrid, inside: Sequence[Cube] = ()) -> List[Cube]:
    """Finest cubes, outside the given cubes, on which f is not constant."""
    _check_coverage(f, grid)
    covered = {c.id for c in inside}
    for cube in inside:
        covered.update(d.id for d in grid.descendants(cube))
    leaves = [leaf for leaf in grid.leaves() if leaf.id not in covered]
    if not leaves:
        return []
    if grid.kind == "finite":
        return [leaf for leaf in leaves if np.ptp(f.values[leaf.members.index_array]) > 0.0]
    jumps = f.jumps()
    lo = np.array([leaf.interval[0] for leaf in leaves])
    hi = np.array([leaf.interval[1] for leaf in leaves])
    inner = np.searchsorted(jumps, hi, side="left") - np.searchsorted(jumps, lo, side="right")
    return [leaf for leaf, count in zip(leaves, inner) if count > 0]


def cz_decompose(f: AnyFunction, grid: DyadicGrid, lam: float) -> CZDecomposition:
    """f = g + Σ b_j with g = f off ∪Q_j and f_{Q_j} on Q_j, b_j = (f - f_{Q_j})χ_{Q_j}.

    |g| ≤ C(X)·λ needs f constant on every finest cube left outside the Q_j;
    otherwise CoverageError names the first such cube before g is built.
    """
    cubes = cz_cubes(f, grid, LINEAR, lam)
    loose = unresolved_cells(f, grid, cubes)
    if loose:
        cell = loose[0]
        where = cell.interval if grid.kind == "line" else list(cell.members.indices)
        raise CoverageError(
            f"grid does not resolve f: it varies on the finest cube {cell.id} {where} outside the stopping cubes "
            f"({len(loose)} such cubes); refine the grid to generation > {grid.k_max}"
        )
    scale = max(_max_abs(f), 1.0)
    g = f
    parts: List[AnyFunction] = []
    means: List[float] = []
    for cube in cubes:
        region = cube.members
        mean = average(f, region)
        local = f.restricted(region)
        g = g - local + region.indicator(mean)
        parts.append(local - region.indicator(mean))
        means.append(mean)

    rebuilt = g
    for part in parts:
        rebuilt = rebuilt + part
    gap = _max_abs(rebuilt - f)
    if gap > _REL_TOL * scale:
        raise InvariantError("g + sum b_j does not reproduce f", {"max_gap": gap})
    for cube, part in zip(cubes, parts):
        outside = _max_abs(part.restricted(grid.extent.difference(cube.members)))
        if outside > 0.0:
            raise InvariantError("b_j leaves its cube", {"cube": cube.id})
        drift = abs(part.integral(cube.members)) / cube.measure
        if drift > _REL_TOL * scale:
            raise InvariantError("b_j does not have mean zero", {"cube": cube.id, "mean": drift})
    bound = lam * max(1.0, 1.0 / grid.epsilon)
    if _max_abs(g) > bound * (1.0 + 1e-9):
        raise InvariantError("|g| exceeds C(X)·lambda", {"max_g": _max_abs(g), "bound": bound})
    return CZDecomposition(lam, tuple(c.id for c in cubes), g, tuple(parts), tuple(means))


def sparse_apply(S: SparseFamily, f: AnyFunction) -> AnyFunction:
    """T^S f = Σ_{Q∈S} (⨍_Q f) χ_Q, summed exactly."""
    grid = S.grid
    _check_coverage(f, grid)
    members = S.members()
    if grid.kind == "finite":
        values = np.zeros(grid.space.n_points)
        for cube in members:
            values[cube.members.index_array] += average(f, cube.members)
        return PointFunction(values, grid.space.mass)
    if not members:
        return StepFunction.zero()
    ends = [x for cube in members for x in cube.interval]
    breakpoints = np.union1d(f.breakpoints, ends)
    values = np.zeros(breakpoints.size - 1)
    for cube in members:
        lo, hi = cube.interval
        values[np.searchsorted(breakpoints, lo) : np.searchsorted(breakpoints, hi)] += average(f, cube.members)
    return StepFunction(breakpoints, values)


def l2_ratio(S: SparseFamily, f: AnyFunction) -> float:
    """‖T^S f‖₂ / ‖f‖₂ over the grid's space."""
    out = sparse_apply(S, f)
    denominator = f.power(2.0).integral(S.grid.extent)
    if denominator <= 0.0:
        return 0.0
    return math.sqrt(out.power(2.0).integral(S.grid.extent) / denominator)


def _atom_values(grid: DyadicGrid, *functions: AnyFunction) -> Tuple[np.ndarray, List[np.ndarray]]:
    """Sample points of the grid's finest partition (refined by the functions) and values there."""
    if grid.kind == "finite":
        points = np.arange(grid.space.n_points)
        return points, [fn.values for fn in functions]
    cuts = [grid.extent.endpoints()] + [leaf.members.endpoints() for leaf in grid.leaves()]
    cuts += [fn.breakpoints for fn in functions]
    breakpoints = np.unique(np.concatenate(cuts))
    lefts = breakpoints[:-1]
    lefts = lefts[grid.extent.contains(lefts)]
    return lefts, [np.asarray(fn(lefts), dtype=float) for fn in functions]


@dataclass(frozen=True, eq=False)
class DominationCheck:
    lhs: AnyFunction
    rhs: AnyFunction
    a: float
    threshold: float
    holds: bool
    max_violation: float
    family: SparseFamily = field(repr=False)


def maximal_dominated_by_sparse(f: AnyFunction, grid: DyadicGrid, a: Optional[float] = None) -> DominationCheck:
    """Compare M^D f with a·T^S f cell by cell.

    Off Ω at the lowest level M^D f is compared with a times the threshold
    instead, since both sides there come from the coarsest cubes.
    """
    a = 4.0 / grid.epsilon if a is None else float(a)
    family = sparse_from_levels(f, grid, LINEAR, a)
    lhs = dyadic_maximal(f, grid, LINEAR)
    rhs = a * sparse_apply(family, f)
    norms = cube_norms(f, grid, LINEAR)
    threshold = sparse_threshold(f, grid, norms) if np.any(norms > 0.0) else 0.0
    points, (left, right) = _atom_values(grid, lhs, rhs)
    if len(family):
        omega = _union(grid, family.members())
        covered = omega.contains(points)
    else:
        covered = np.zeros(points.shape, dtype=bool)
    ceiling = np.where(covered, right, a * threshold)
    slack = (1.0 + 1e-12) * ceiling + 1e-300
    excess = left - slack
    worst = float(excess.max()) if excess.size else 0.0
    holds = worst <= 0.0
    if not holds:
        logger.warning("sparse domination violated by %.3g", worst)
    return DominationCheck(lhs, rhs, a, threshold, holds, max(worst, 0.0), family)


def _exact_integral(f: AnyFunction, region: Region) -> Fraction:
    if isinstance(region, PointSet):
        idx = region.index_array
        return sum((Fraction(v) * Fraction(m) for v, m in zip(f.values[idx], region.mass[idx])), Fraction(0))
    total = Fraction(0)
    for lo, hi in region.intervals:
        lo, hi = Fraction(lo), Fraction(hi)
        for left, right, value in zip(f.lefts, f.rights, f.values):
            a, b = max(Fraction(left), lo), min(Fraction(right), hi)
            if a < b:
                total += Fraction(value) * (b - a)
    return total


def _exact_measure(region: Region) -> Fraction:
    if isinstance(region, PointSet):
        idx = region.index_array
        return sum((Fraction(m) for m in region.mass[idx]), Fraction(0))
    return sum((Fraction(hi) - Fraction(lo) for lo, hi in region.intervals), Fraction(0))


def bad_part_leakage(f: AnyFunction, family: SparseFamily, stopping: Sequence[Cube]) -> Fraction:
    """Σ_{Q∈S, Q⊄Ω} |Σ_j ∫_Q b_j| in exact rational arithmetic, Ω the union of the stopping cubes.

    T^S b vanishes off Ω exactly when this is zero.
    """
    grid = family.grid
    omega = _union(grid, stopping)
    means = [(cube.members, _exact_integral(f, cube.members) / _exact_measure(cube.members)) for cube in stopping]
    total = Fraction(0)
    for cube in family.members():
        if stopping and cube.members.issubset(omega):
            continue
        inside = Fraction(0)
        for region, mean in means:
            overlap = region.intersection(cube.members)
            if overlap.measure > 0.0:
                inside += _exact_integral(f, overlap) - mean * _exact_measure(overlap)
        total += abs(inside)
    if total != 0:
        logger.warning("bad parts leak outside the stopping cubes: %s", float(total))
    return total
