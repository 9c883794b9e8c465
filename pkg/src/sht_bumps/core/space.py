"""Spaces of homogeneous type and their dyadic grids.

Two models are supported: the real line with Lebesgue measure, where the
grids are (shifted) dyadic intervals, and finite quasi-metric spaces, where
nested nets give a dyadic decomposition whose constants are measured after
construction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import DomainError, InvariantError, ParameterError
from .stepfunctions import IntervalSet, PointSet, Region

logger = logging.getLogger(__name__)

LINE_SHIFTS: Tuple[float, ...] = (0.0, 1.0 / 3.0, 2.0 / 3.0)
# deepest generation a line grid is refined to when it has to resolve a function
RESOLVING_LIMIT = 12


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    """Finite quasi-metric measure space (X, ρ, μ)."""

    dist: np.ndarray = field(repr=False)
    mass: np.ndarray = field(repr=False)
    name: str = "finite"

    def __post_init__(self) -> None:
        dist = np.asarray(self.dist, dtype=float)
        mass = np.asarray(self.mass, dtype=float)
        n = mass.size
        if n == 0:
            raise DomainError("a finite space needs at least one point")
        if dist.shape != (n, n):
            raise DomainError(f"distance table must be {n}x{n}, got {dist.shape}")
        if not np.all(np.isfinite(dist)) or not np.allclose(dist, dist.T, rtol=0.0, atol=0.0):
            raise DomainError("distance table must be finite and symmetric")
        if np.any(np.diag(dist) != 0.0):
            raise DomainError("distance table must have a zero diagonal")
        off = dist[~np.eye(n, dtype=bool)]
        if off.size and np.any(off <= 0.0):
            raise DomainError("distinct points must be at positive distance")
        if not np.all(np.isfinite(mass)) or np.any(mass <= 0.0):
            raise DomainError("point masses must be positive and finite")
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "mass", mass)

    @property
    def n_points(self) -> int:
        return int(self.mass.size)

    @property
    def total_mass(self) -> float:
        return float(self.mass.sum())

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    @property
    def min_distance(self) -> float:
        if self.n_points == 1:
            return 0.0
        return float(self.dist[~np.eye(self.n_points, dtype=bool)].min())

    @cached_property
    def K(self) -> float:
        """Smallest K with ρ(x,z) ≤ K(ρ(x,y)+ρ(y,z)), by exhaustive triple scan."""
        d = self.dist
        worst = 0.0
        for y in range(self.n_points):
            through = d[:, y][:, None] + d[y, :][None, :]
            ratio = np.divide(d, through, out=np.zeros_like(d), where=through > 0.0)
            worst = max(worst, float(ratio.max()))
        return max(1.0, worst)

    @cached_property
    def doubling_constant(self) -> float:
        """max over centers and radii r ≤ diameter of μ(B(x,2r))/μ(B(x,r))."""
        worst = 1.0
        for x in range(self.n_points):
            order = np.argsort(self.dist[x], kind="stable")
            radii = self.dist[x][order]
            cumulative = np.cumsum(self.mass[order])
            steps = np.unique(radii[radii > 0.0])
            if steps.size == 0:
                continue
            inner = cumulative[np.searchsorted(radii, steps, side="left") - 1]
            outer = cumulative[np.searchsorted(radii, 2.0 * steps, side="left") - 1]
            worst = max(worst, float((outer / inner).max()))
        return worst

    def ball(self, center: int, radius: float) -> PointSet:
        return PointSet(tuple(np.flatnonzero(self.dist[center] < radius)), self.mass)

    def everything(self) -> PointSet:
        return PointSet(tuple(range(self.n_points)), self.mass)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "dist": self.dist.tolist(), "mass": self.mass.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FiniteSpace":
        try:
            return cls(np.asarray(data["dist"], dtype=float), np.asarray(data["mass"], dtype=float), data.get("name", "finite"))
        except KeyError as exc:
            raise DomainError(f"finite space payload is missing {exc}") from exc


def circle_space(n: int, mass: float = 1.0) -> FiniteSpace:
    """n equally spaced points on the unit circle with arc distance."""
    if n < 1:
        raise DomainError("circle needs at least one point")
    angles = 2.0 * np.pi * np.arange(n) / n
    gap = np.abs(angles[:, None] - angles[None, :])
    dist = np.minimum(gap, 2.0 * np.pi - gap)
    np.fill_diagonal(dist, 0.0)
    return FiniteSpace(dist, np.full(n, float(mass)), name=f"circle-{n}")


def random_plane_space(n: int, seed: int = 0, random_mass: bool = False) -> FiniteSpace:
    """n uniform points in the unit square with the ℓ∞ distance."""
    if n < 1:
        raise DomainError("plane sample needs at least one point")
    rng = np.random.default_rng(seed)
    points = rng.random((n, 2))
    dist = np.abs(points[:, None, :] - points[None, :, :]).max(axis=2)
    mass = rng.uniform(0.5, 2.0, size=n) if random_mass else np.ones(n)
    return FiniteSpace(dist, mass, name=f"plane-{n}-seed{seed}")


def snowflake_space(base: FiniteSpace, beta: float) -> FiniteSpace:
    """ρ = d^β; β > 1 turns a metric into a genuine quasi-metric."""
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError(f"snowflake exponent must be positive, got {beta}")
    return FiniteSpace(np.power(base.dist, beta), base.mass, name=f"{base.name}^{beta:g}")


@dataclass(frozen=True, eq=False)
class Cube:
    id: int
    generation: int
    center: Union[float, int]
    members: Region
    parent: Optional[int]
    children: Tuple[int, ...] = ()

    @property
    def measure(self) -> float:
        return self.members.measure

    @property
    def interval(self) -> Tuple[float, float]:
        if not isinstance(self.members, IntervalSet):
            raise DomainError("only line cubes are intervals")
        return self.members.bounds

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "id": self.id,
            "generation": self.generation,
            "center": self.center,
            "parent": self.parent,
            "children": list(self.children),
        }
        payload.update(self.members.to_dict())
        return payload


@dataclass(frozen=True, eq=False)
class DyadicGrid:
    """Nested partitions D_k, generation k having scale η^k (finer as k grows)."""

    kind: str
    cubes: Tuple[Cube, ...]
    generations: Dict[int, Tuple[int, ...]]
    C: float
    eta: float
    epsilon: float
    extent: Region
    shift: Optional[float] = None
    space: Optional[FiniteSpace] = field(default=None, repr=False)
    seed: Optional[int] = None

    @property
    def k_min(self) -> int:
        return min(self.generations)

    @property
    def k_max(self) -> int:
        return max(self.generations)

    def cube(self, cube_id: int) -> Cube:
        return self.cubes[cube_id]

    def generation(self, k: int) -> List[Cube]:
        return [self.cubes[i] for i in self.generations.get(k, ())]

    def top(self) -> List[Cube]:
        return self.generation(self.k_min)

    def leaves(self) -> List[Cube]:
        return self.generation(self.k_max)

    def scale(self, k: int) -> float:
        return self.eta ** k

    def measure(self, region: Region) -> float:
        return region.measure

    @cached_property
    def _locator(self) -> Dict[int, Tuple[np.ndarray, np.ndarray]]:
        index: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        for k, ids in self.generations.items():
            if self.kind == "line":
                starts = np.array([self.cubes[i].interval[0] for i in ids])
                order = np.argsort(starts)
                index[k] = (starts[order], np.asarray(ids)[order])
            else:
                labels = np.full(self.space.n_points, -1, dtype=int)
                for i in ids:
                    labels[self.cubes[i].members.index_array] = i
                index[k] = (labels, np.asarray(ids))
        return index

    def locate(self, x: Union[float, int], k: int) -> Optional[int]:
        """Id of the generation-k cube containing x, or None."""
        keys, ids = self._locator[k]
        if self.kind == "line":
            pos = int(np.searchsorted(keys, x, side="right")) - 1
            if pos < 0:
                return None
            cube = self.cubes[int(ids[pos])]
            lo, hi = cube.interval
            return cube.id if lo <= x < hi else None
        label = int(keys[int(x)])
        return label if label >= 0 else None

    def labels(self, k: int) -> np.ndarray:
        """Finite grids: generation-k cube id of every point."""
        if self.kind != "finite":
            raise DomainError("point labels exist only on finite grids")
        return self._locator[k][0]

    def chain(self, x: Union[float, int]) -> List[Cube]:
        """Cubes containing x, coarse to fine."""
        out = []
        for k in sorted(self.generations):
            found = self.locate(x, k)
            if found is not None:
                out.append(self.cubes[found])
        return out

    def ancestors(self, cube: Cube) -> List[Cube]:
        out = []
        while cube.parent is not None:
            cube = self.cubes[cube.parent]
            out.append(cube)
        return out

    def descendants(self, cube: Cube) -> List[Cube]:
        out, stack = [], list(cube.children)
        while stack:
            child = self.cubes[stack.pop()]
            out.append(child)
            stack.extend(child.children)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "constants": {"C": self.C, "eta": self.eta, "epsilon": self.epsilon},
            "shift": self.shift,
            "seed": self.seed,
            "extent": self.extent.to_dict(),
            "space": self.space.to_dict() if self.space is not None else None,
            "generations": [
                {"k": k, "cubes": [self.cubes[i].to_dict() for i in ids]} for k, ids in sorted(self.generations.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DyadicGrid":
        try:
            kind = data["kind"]
            space = FiniteSpace.from_dict(data["space"]) if data.get("space") else None
            cubes: Dict[int, Cube] = {}
            generations: Dict[int, Tuple[int, ...]] = {}
            for entry in data["generations"]:
                ids = []
                for raw in entry["cubes"]:
                    if kind == "line":
                        members: Region = IntervalSet(tuple(tuple(p) for p in raw["intervals"]))
                    else:
                        members = PointSet(tuple(raw["indices"]), space.mass)
                    cubes[int(raw["id"])] = Cube(
                        int(raw["id"]), int(entry["k"]), raw["center"], members, raw["parent"], tuple(raw["children"])
                    )
                    ids.append(int(raw["id"]))
                generations[int(entry["k"])] = tuple(ids)
            constants = data["constants"]
            if kind == "line":
                extent: Region = IntervalSet(tuple(tuple(p) for p in data["extent"]["intervals"]))
            else:
                extent = space.everything()
        except (KeyError, TypeError, AttributeError) as exc:
            raise DomainError(f"invalid grid payload: {exc}") from exc
        ordered = tuple(cubes[i] for i in range(len(cubes)))
        return cls(
            kind,
            ordered,
            generations,
            float(constants["C"]),
            float(constants["eta"]),
            float(constants["epsilon"]),
            extent,
            shift=data.get("shift"),
            space=space,
            seed=data.get("seed"),
        )


class _CubeBuilder:
    """Mutable cube records, frozen into a DyadicGrid once complete."""

    def __init__(self) -> None:
        self.records: List[Dict[str, Any]] = []
        self.generations: Dict[int, List[int]] = {}

    def add(self, k: int, center: Union[float, int], members: Region, parent: Optional[int]) -> int:
        cube_id = len(self.records)
        self.records.append({"k": k, "center": center, "members": members, "parent": parent, "children": []})
        self.generations.setdefault(k, []).append(cube_id)
        if parent is not None:
            self.records[parent]["children"].append(cube_id)
        return cube_id

    def freeze(self) -> Tuple[Tuple[Cube, ...], Dict[int, Tuple[int, ...]]]:
        cubes = tuple(
            Cube(i, r["k"], r["center"], r["members"], r["parent"], tuple(r["children"])) for i, r in enumerate(self.records)
        )
        return cubes, {k: tuple(ids) for k, ids in self.generations.items()}


def _coarse_offset(shift: float, k: int, mode: str) -> Fraction:
    """Offset o (in units of the coarse side) with cubes 2^{-k}[m + o, m + 1 + o)."""
    side = Fraction(2) ** (-k)
    third = Fraction(shift).limit_denominator(1000)
    alternating_ok = (3 * third).denominator == 1 and abs(float(third) - shift) < 1e-12
    if mode == "alternating" or (mode == "auto" and alternating_ok):
        if not alternating_ok:
            raise ParameterError(f"alternating shifts need 3t to be an integer, got t={shift}")
        return third if k % 2 == 0 else -third
    if mode not in ("auto", "translate"):
        raise ParameterError(f"unknown shift mode {mode!r}")
    return Fraction(shift) / side


def line_grid(
    shift: float = 0.0,
    k_min: int = 0,
    k_max: int = 8,
    window: Optional[IntervalSet] = None,
    mode: str = "auto",
) -> DyadicGrid:
    """Shifted dyadic intervals of side 2^{-k}, k_min ≤ k ≤ k_max, covering the window.

    Shifts t with 3t integral use the alternating family 2^{-k}([0,1) + m + (-1)^k t),
    which stays nested across generations; other shifts translate the standard grid.
    """
    if k_min > k_max:
        raise ParameterError(f"k_min={k_min} exceeds k_max={k_max}")
    window = window if window is not None else IntervalSet.of((0.0, 1.0))
    if window.is_empty:
        raise ParameterError("line grid window is empty")
    offset = _coarse_offset(float(shift), k_min, mode)
    side = Fraction(2) ** (-k_min)
    a, b = window.bounds
    m_lo = math.floor(Fraction(a) / side - offset)
    m_hi = math.ceil(Fraction(b) / side - offset)

    builder = _CubeBuilder()
    frontier: List[Tuple[int, float, float]] = []
    for m in range(m_lo, m_hi):
        lo, hi = float(side * (m + offset)), float(side * (m + 1 + offset))
        if window.overlap(np.array([lo]), np.array([hi]))[0] <= 0.0:
            continue
        frontier.append((builder.add(k_min, (lo + hi) / 2.0, IntervalSet.of((lo, hi)), None), lo, hi))
    extent = IntervalSet(tuple((lo, hi) for _, lo, hi in frontier))

    for k in range(k_min + 1, k_max + 1):
        nxt = []
        for parent, lo, hi in frontier:
            mid = (lo + hi) / 2.0
            for clo, chi in ((lo, mid), (mid, hi)):
                nxt.append((builder.add(k, (clo + chi) / 2.0, IntervalSet.of((clo, chi)), parent), clo, chi))
        frontier = nxt

    cubes, generations = builder.freeze()
    logger.debug("line grid shift=%s k=%d..%d with %d cubes", shift, k_min, k_max, len(cubes))
    return DyadicGrid("line", cubes, generations, C=1.0, eta=0.5, epsilon=0.5, extent=extent, shift=float(shift))


def shifted_line_grids(k_min: int = 0, k_max: int = 8, window: Optional[IntervalSet] = None) -> List[DyadicGrid]:
    """The adjacent family {D^t : t ∈ {0, 1/3, 2/3}}."""
    return [line_grid(t, k_min, k_max, window) for t in LINE_SHIFTS]


def resolving_generation(points: Iterable[float], k_min: int = 0, limit: int = RESOLVING_LIMIT) -> Optional[int]:
    """Smallest k ≥ k_min with every point an endpoint of the unshifted generation-k intervals.

    None when some point needs a generation beyond ``limit``; a float such as
    0.001 is a dyadic rational only at a depth no grid can reach.
    """
    k = k_min
    for x in points:
        denominator = Fraction(float(x)).denominator
        k = max(k, denominator.bit_length() - 1)
        if k > limit:
            return None
    return k


def default_eta(space: FiniteSpace) -> float:
    return 1.0 / (12.0 * space.K ** 3)


def finite_grid(space: FiniteSpace, eta: Optional[float] = None, seed: int = 0) -> DyadicGrid:
    """Dyadic decomposition of a finite space from nested greedy η^k-nets.

    Centers of generation k are the previous centers followed by points, in a
    seeded order, at distance ≥ η^k from all centers chosen so far. Points of a
    parent cube go to the nearest child center inside that parent.
    """
    K = space.K
    eta = default_eta(space) if eta is None else float(eta)
    if not (0.0 < eta <= 1.0 / (8.0 * K * K)):
        raise ParameterError(f"eta must lie in (0, 1/(8K^2)] = (0, {1.0 / (8.0 * K * K):.6g}], got {eta}")

    d = space.dist
    diameter, spacing = space.diameter, space.min_distance
    k0 = 0
    if diameter > 0.0:
        while eta ** k0 <= diameter:
            k0 -= 1
        while eta ** (k0 + 1) > diameter:
            k0 += 1
    k_last = k0 + 1
    while spacing > 0.0 and eta ** k_last >= spacing:
        k_last += 1

    order = np.random.default_rng(seed).permutation(space.n_points)
    builder = _CubeBuilder()
    everyone = np.arange(space.n_points)
    centers: List[int] = [int(order[0])]
    top = builder.add(k0, centers[0], PointSet(tuple(everyone), space.mass), None)
    labels = np.full(space.n_points, top, dtype=int)

    for k in range(k0 + 1, k_last + 1):
        radius = eta ** k
        net = list(centers)
        for point in order:
            point = int(point)
            if point in net:
                continue
            if d[point, net].min() >= radius:
                net.append(point)
        new_labels = np.full(space.n_points, -1, dtype=int)
        for parent in dict.fromkeys(labels.tolist()):
            inside = np.flatnonzero(labels == parent)
            kids = sorted(c for c in net if labels[c] == parent)
            to_kids = d[np.ix_(inside, kids)]
            nearest = np.asarray(kids)[np.argmin(to_kids, axis=1)]
            for kid in kids:
                members = inside[nearest == kid]
                new_labels[members] = builder.add(k, kid, PointSet(tuple(members), space.mass), parent)
        labels, centers = new_labels, net

    cubes, generations = builder.freeze()
    epsilon = min(
        (c.measure / cubes[c.parent].measure for c in cubes if c.parent is not None),
        default=1.0,
    )
    outer = max(
        float(d[c.center, c.members.index_array].max()) / eta ** c.generation for c in cubes
    )
    C = outer * (1.0 + 1e-9) if outer > 0.0 else 1.0
    logger.info(
        "finite grid on %s: eta=%.4g, generations %d..%d, %d cubes, epsilon=%.4g, C=%.4g",
        space.name, eta, k0, k_last, len(cubes), epsilon, C,
    )
    return DyadicGrid("finite", cubes, generations, C=C, eta=eta, epsilon=epsilon, extent=space.everything(), space=space, seed=seed)


@dataclass
class GridReport:
    passed: bool
    properties: Dict[str, bool]
    witnesses: Dict[str, Dict[str, Any]]
    epsilon: float
    outer_constant: float
    inner_constant: float
    eta: float
    n_cubes: int

    def raise_if_failed(self) -> None:
        if not self.passed:
            failed = sorted(name for name, ok in self.properties.items() if not ok)
            raise InvariantError(f"grid properties failed: {', '.join(failed)}", self.witnesses)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "properties": dict(self.properties),
            "witnesses": dict(self.witnesses),
            "epsilon": self.epsilon,
            "outer_constant": self.outer_constant,
            "inner_constant": self.inner_constant,
            "eta": self.eta,
            "n_cubes": self.n_cubes,
        }


def _atoms(grid: DyadicGrid) -> Tuple[np.ndarray, List[np.ndarray], np.ndarray]:
    """Atom measures, each cube's atom indices, and a mask of atoms in the extent."""
    if grid.kind == "finite":
        mass = grid.space.mass
        return mass, [c.members.index_array for c in grid.cubes], np.ones(mass.size, dtype=bool)
    points = np.unique(np.concatenate([c.members.endpoints() for c in grid.cubes] + [grid.extent.endpoints()]))
    measures = np.diff(points)
    per_cube = []
    for c in grid.cubes:
        ranges = [
            np.arange(np.searchsorted(points, lo), np.searchsorted(points, hi)) for lo, hi in c.members.intervals
        ]
        per_cube.append(np.concatenate(ranges) if ranges else np.array([], dtype=int))
    mids = (points[:-1] + points[1:]) / 2.0
    return measures, per_cube, grid.extent.contains(mids)


def _ball_ratios(grid: DyadicGrid, cube: Cube) -> Tuple[bool, float, float]:
    """(center inside, sup distance to members / η^k, distance to non-members / η^k)."""
    scale = grid.scale(cube.generation)
    if grid.kind == "line":
        lo, hi = cube.interval
        c = float(cube.center)
        inside = bool(cube.members.contains(c))
        outer = max(c - lo, hi - c) / scale
        inner = min(c - lo, hi - c) / scale if inside else 0.0
        return inside, outer, inner
    row = grid.space.dist[int(cube.center)]
    members = cube.members.index_array
    others = np.setdiff1d(np.arange(grid.space.n_points), members)
    inside = bool(int(cube.center) in cube.members.indices)
    outer = float(row[members].max()) / scale if members.size else 0.0
    inner = float(row[others].min()) / scale if others.size else math.inf
    return inside, outer, inner


def verify_grid(grid: DyadicGrid) -> GridReport:
    """Check the five dyadic-decomposition properties and measure the constants.

    (1) each generation partitions the space; (2) cubes are nested or disjoint;
    (3) every non-top cube has exactly one parent, recorded consistently;
    (4) μ(child) ≥ ε μ(parent); (5) B(x_c, c₀η^k) ⊆ Q ⊆ B(x_c, Cη^k).
    """
    if not grid.cubes:
        raise DomainError("cannot verify an empty grid")
    measures, per_cube, in_extent = _atoms(grid)
    properties = {name: True for name in ("partition", "nested", "parents", "mass_ratio", "balls")}
    witnesses: Dict[str, Dict[str, Any]] = {}

    def fail(name: str, **witness: Any) -> None:
        if properties[name]:
            properties[name] = False
            witnesses[name] = witness
            logger.warning("grid property %s failed: %s", name, witness)

    labels: Dict[int, np.ndarray] = {}
    for k, ids in sorted(grid.generations.items()):
        counts = np.zeros(measures.size, dtype=int)
        label = np.full(measures.size, -1, dtype=int)
        for i in ids:
            counts[per_cube[i]] += 1
            label[per_cube[i]] = i
        bad = np.flatnonzero((counts != 1) & in_extent | (counts != 0) & ~in_extent)
        if bad.size:
            fail("partition", generation=k, atom=int(bad[0]), cover_count=int(counts[bad[0]]))
        labels[k] = label

    epsilon, outer, inner = math.inf, 0.0, math.inf
    for cube in grid.cubes:
        atoms = per_cube[cube.id]
        k = cube.generation
        if k > grid.k_min:
            above = np.unique(labels[k - 1][atoms]) if atoms.size else np.array([], dtype=int)
            if above.size != 1 or above[0] < 0:
                fail("nested", cube=cube.id, generation=k, coarser_cubes=above.tolist())
            elif cube.parent != int(above[0]) or cube.id not in grid.cubes[int(above[0])].children:
                fail("parents", cube=cube.id, recorded_parent=cube.parent, containing_cube=int(above[0]))
        elif cube.parent is not None:
            fail("parents", cube=cube.id, recorded_parent=cube.parent, containing_cube=None)
        if cube.parent is not None:
            parent_measure = grid.cubes[cube.parent].measure
            if parent_measure > 0.0:
                epsilon = min(epsilon, cube.measure / parent_measure)
        center_in, cube_outer, cube_inner = _ball_ratios(grid, cube)
        outer = max(outer, cube_outer)
        inner = min(inner, cube_inner)
        if not center_in or cube_inner <= 0.0 or cube_outer > grid.C:
            fail("balls", cube=cube.id, center_inside=center_in, outer=cube_outer, inner=cube_inner)

    if not math.isfinite(epsilon):
        epsilon = 1.0
    if epsilon <= 0.0 or epsilon < grid.epsilon * (1.0 - 1e-12):
        fail("mass_ratio", achieved=epsilon, recorded=grid.epsilon)
    report = GridReport(
        passed=all(properties.values()),
        properties=properties,
        witnesses=witnesses,
        epsilon=epsilon,
        outer_constant=outer,
        inner_constant=inner,
        eta=grid.eta,
        n_cubes=len(grid.cubes),
    )
    logger.info("grid check passed=%s epsilon=%.4g C=%.4g c0=%.4g", report.passed, epsilon, outer, inner)
    return report


def dilate(grid: DyadicGrid, cube: Cube, lam: float) -> Region:
    """λQ = B(x_c(Q), λ·C·η^k)."""
    if not (math.isfinite(lam) and lam >= 1.0):
        raise ParameterError(f"dilation factor must be >= 1, got {lam}")
    radius = lam * grid.C * grid.scale(cube.generation)
    if grid.kind == "line":
        c = float(cube.center)
        return IntervalSet.of((c - radius, c + radius))
    return grid.space.ball(int(cube.center), radius)


def smallest_containing_cube(grids: Sequence[DyadicGrid], region: Region) -> Optional[Tuple[int, Cube]]:
    """(grid index, cube) of least measure among cubes of any grid containing the region."""
    best: Optional[Tuple[int, Cube]] = None
    for g_index, grid in enumerate(grids):
        for k in sorted(grid.generations, reverse=True):
            if isinstance(region, IntervalSet):
                lo, hi = region.bounds
                found = grid.locate(lo, k)
                if found is None or not region.issubset(grid.cubes[found].members):
                    continue
            else:
                labels = grid.labels(k)[region.index_array]
                if labels.size == 0 or np.any(labels != labels[0]) or labels[0] < 0:
                    continue
                found = int(labels[0])
            cube = grid.cubes[found]
            if best is None or cube.measure < best[1].measure:
                best = (g_index, cube)
            break
    return best


@dataclass
class CoverReport:
    grids_used: int
    worst_ratio: float
    uncovered: List[Dict[str, Any]]

    @property
    def certified(self) -> bool:
        return not self.uncovered

    def to_dict(self) -> Dict[str, Any]:
        return {"grids_used": self.grids_used, "worst_ratio": self.worst_ratio, "uncovered": self.uncovered[:10]}


def cover_count(grids: Sequence[DyadicGrid], regions: Iterable[Region], max_ratio: float) -> CoverReport:
    """Certify that every region lies in a cube of one grid with μ(Q) ≤ max_ratio·μ(region).

    ``grids_used`` is the number of distinct grids that supplied a best cube.
    """
    used = set()
    worst = 0.0
    uncovered: List[Dict[str, Any]] = []
    for region in regions:
        found = smallest_containing_cube(grids, region)
        size = region.measure
        ratio = found[1].measure / size if found is not None and size > 0 else math.inf
        if found is None or ratio > max_ratio:
            uncovered.append({"region": region.to_dict(), "ratio": ratio})
            continue
        used.add(found[0])
        worst = max(worst, ratio)
    return CoverReport(len(used), worst, uncovered)


def space_balls(space: FiniteSpace) -> List[PointSet]:
    """Every distinct ball B(x, r) with r one of the distances from x (plus the whole space)."""
    balls: Dict[Tuple[int, ...], PointSet] = {}
    for x in range(space.n_points):
        for r in np.unique(space.dist[x]):
            if r <= 0.0:
                continue
            ball = space.ball(x, float(r))
            balls.setdefault(ball.indices, ball)
    whole = space.everything()
    balls.setdefault(whole.indices, whole)
    return list(balls.values())


def finite_grid_family(
    space: FiniteSpace,
    eta: Optional[float] = None,
    max_ratio: Optional[float] = None,
    max_grids: int = 16,
    first_seed: int = 0,
) -> Tuple[List[DyadicGrid], CoverReport]:
    """Add grids from successive seeds until every ball is certified covered."""
    balls = space_balls(space)
    bound = max_ratio if max_ratio is not None else space.doubling_constant ** 4
    grids: List[DyadicGrid] = []
    report = CoverReport(0, math.inf, [{"region": "all"}])
    for seed in range(first_seed, first_seed + max_grids):
        grids.append(finite_grid(space, eta, seed))
        report = cover_count(grids, balls, bound)
        if report.certified:
            break
    logger.info("ball cover on %s: %d grids, certified=%s", space.name, len(grids), report.certified)
    return grids, report
