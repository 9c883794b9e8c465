"""Step functions and measurable sets on the line and on finite spaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import DomainError

Interval = Tuple[float, float]


def _normalize(intervals: Iterable[Sequence[float]]) -> Tuple[Interval, ...]:
    pairs = sorted((float(lo), float(hi)) for lo, hi in intervals)
    merged: List[List[float]] = []
    for lo, hi in pairs:
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise DomainError(f"interval endpoints must be finite, got ({lo}, {hi})")
        if hi <= lo:
            continue
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of disjoint half-open intervals [lo, hi) with Lebesgue measure."""

    intervals: Tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "intervals", _normalize(self.intervals))

    @classmethod
    def of(cls, *pairs: Sequence[float]) -> "IntervalSet":
        return cls(tuple(tuple(p) for p in pairs))

    @property
    def measure(self) -> float:
        return float(sum(hi - lo for lo, hi in self.intervals))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def bounds(self) -> Interval:
        if not self.intervals:
            raise DomainError("empty set has no bounds")
        return self.intervals[0][0], self.intervals[-1][1]

    def endpoints(self) -> np.ndarray:
        return np.array([x for pair in self.intervals for x in pair], dtype=float)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.intervals + other.intervals)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out: List[Interval] = []
        for lo, hi in self.intervals:
            for olo, ohi in other.intervals:
                a, b = max(lo, olo), min(hi, ohi)
                if a < b:
                    out.append((a, b))
        return IntervalSet(tuple(out))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        pieces = list(self.intervals)
        for olo, ohi in other.intervals:
            nxt: List[Interval] = []
            for lo, hi in pieces:
                if ohi <= lo or olo >= hi:
                    nxt.append((lo, hi))
                    continue
                if lo < olo:
                    nxt.append((lo, olo))
                if ohi < hi:
                    nxt.append((ohi, hi))
            pieces = nxt
        return IntervalSet(tuple(pieces))

    def contains(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        inside = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.intervals:
            inside |= (x >= lo) & (x < hi)
        return inside

    def issubset(self, other: "IntervalSet", tol: float = 0.0) -> bool:
        return self.difference(other).measure <= tol

    def overlap(self, lefts: np.ndarray, rights: np.ndarray) -> np.ndarray:
        """Measure of [lefts_i, rights_i) ∩ self for each cell i."""
        total = np.zeros(np.shape(lefts), dtype=float)
        for lo, hi in self.intervals:
            total += np.clip(np.minimum(rights, hi) - np.maximum(lefts, lo), 0.0, None)
        return total

    def indicator(self, value: float = 1.0) -> "StepFunction":
        if not self.intervals:
            return StepFunction.zero()
        points = self.endpoints()
        breakpoints = np.unique(points)
        mids = (breakpoints[:-1] + breakpoints[1:]) / 2.0
        return StepFunction(breakpoints, np.where(self.contains(mids), value, 0.0))

    def to_dict(self) -> Dict[str, Any]:
        return {"intervals": [list(pair) for pair in self.intervals]}


@dataclass(frozen=True, eq=False)
class PointSet:
    """Subset of a finite space; ``mass`` is the measure of every point of the space."""

    indices: Tuple[int, ...]
    mass: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", tuple(sorted(set(int(i) for i in self.indices))))
        object.__setattr__(self, "mass", np.asarray(self.mass, dtype=float))
        if self.indices and (self.indices[0] < 0 or self.indices[-1] >= self.mass.size):
            raise DomainError("point index outside the space")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PointSet) and self.indices == other.indices

    def __hash__(self) -> int:
        return hash(self.indices)

    @property
    def index_array(self) -> np.ndarray:
        return np.array(self.indices, dtype=int)

    @property
    def measure(self) -> float:
        return float(self.mass[self.index_array].sum()) if self.indices else 0.0

    @property
    def is_empty(self) -> bool:
        return not self.indices

    def _with(self, indices: Iterable[int]) -> "PointSet":
        return PointSet(tuple(indices), self.mass)

    def union(self, other: "PointSet") -> "PointSet":
        return self._with(set(self.indices) | set(other.indices))

    def intersection(self, other: "PointSet") -> "PointSet":
        return self._with(set(self.indices) & set(other.indices))

    def difference(self, other: "PointSet") -> "PointSet":
        return self._with(set(self.indices) - set(other.indices))

    def contains(self, i: Any) -> Any:
        return np.isin(np.asarray(i), self.index_array)

    def issubset(self, other: "PointSet", tol: float = 0.0) -> bool:
        return set(self.indices) <= set(other.indices)

    def indicator(self, value: float = 1.0) -> "PointFunction":
        values = np.zeros(self.mass.size)
        values[self.index_array] = value
        return PointFunction(values, self.mass)

    def to_dict(self) -> Dict[str, Any]:
        return {"indices": list(self.indices)}


Region = Union[IntervalSet, PointSet]


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Piecewise constant function: ``values[i]`` on [breakpoints[i], breakpoints[i+1]), zero elsewhere.

    Values may be negative: the mean-zero parts b_j of a Calderón–Zygmund
    decomposition and differences of functions are step functions too.
    Nonnegativity is a property of weights and is checked where weights are
    built (``WeightPair``, ``bump_double_uv``); norms and averages act on |f|.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise DomainError("a step function needs at least two breakpoints")
        if vals.shape != (bp.size - 1,):
            raise DomainError(f"expected {bp.size - 1} values, got {vals.size}")
        if not np.all(np.isfinite(bp)) or not np.all(np.isfinite(vals)):
            raise DomainError("step function data must be finite")
        if np.any(np.diff(bp) <= 0.0):
            raise DomainError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls(np.array([0.0, 1.0]), np.array([0.0]))

    @classmethod
    def indicator(cls, lo: float, hi: float, value: float = 1.0) -> "StepFunction":
        return cls(np.array([lo, hi]), np.array([value]))

    @classmethod
    def from_cells(cls, cells: Iterable[Tuple[float, float, float]]) -> "StepFunction":
        """Sum of value·χ_[lo, hi) over the given cells."""
        total = cls.zero()
        for lo, hi, value in cells:
            total = total + cls.indicator(lo, hi, value)
        return total.simplified()

    @property
    def lefts(self) -> np.ndarray:
        return self.breakpoints[:-1]

    @property
    def rights(self) -> np.ndarray:
        return self.breakpoints[1:]

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def domain(self) -> IntervalSet:
        return IntervalSet.of((self.breakpoints[0], self.breakpoints[-1]))

    def jumps(self) -> np.ndarray:
        """Breakpoints where the value changes, counting the zero extension outside the domain."""
        padded = np.concatenate(([0.0], self.values, [0.0]))
        return self.breakpoints[padded[:-1] != padded[1:]]

    def __call__(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        valid = (idx >= 0) & (idx < self.values.size)
        return np.where(valid, self.values[np.clip(idx, 0, self.values.size - 1)], 0.0)

    def refined(self, points: Iterable[float]) -> "StepFunction":
        extra = np.asarray(list(points), dtype=float)
        breakpoints = np.union1d(self.breakpoints, extra[np.isfinite(extra)])
        return StepFunction(breakpoints, self(breakpoints[:-1]))

    def _combine(self, other: "StepFunction", op: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "StepFunction":
        breakpoints = np.union1d(self.breakpoints, other.breakpoints)
        lefts = breakpoints[:-1]
        return StepFunction(breakpoints, op(self(lefts), other(lefts)))

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return self._combine(other, np.add)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self._combine(other, np.subtract)

    def __mul__(self, other: Union["StepFunction", float]) -> "StepFunction":
        if isinstance(other, StepFunction):
            return self._combine(other, np.multiply)
        return StepFunction(self.breakpoints, self.values * float(other))

    __rmul__ = __mul__

    def __neg__(self) -> "StepFunction":
        return StepFunction(self.breakpoints, -self.values)

    def __abs__(self) -> "StepFunction":
        return StepFunction(self.breakpoints, np.abs(self.values))

    def power(self, q: float) -> "StepFunction":
        return StepFunction(self.breakpoints, np.power(np.abs(self.values), q))

    def maximum(self, other: "StepFunction") -> "StepFunction":
        return self._combine(other, np.maximum)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "StepFunction":
        """Apply ``fn`` cellwise; ``fn(0)`` must be 0 for the result to stay meaningful off the domain."""
        return StepFunction(self.breakpoints, np.asarray(fn(self.values), dtype=float))

    def floored(self, tau: float, lo: float, hi: float) -> "StepFunction":
        """max(f, tau) on [lo, hi), f elsewhere."""
        breakpoints = np.union1d(self.breakpoints, [lo, hi])
        lefts = breakpoints[:-1]
        values = self(lefts)
        inside = (lefts >= lo) & (lefts < hi)
        values = np.where(inside, np.maximum(values, tau), values)
        return StepFunction(breakpoints, values)

    def restricted(self, region: IntervalSet) -> "StepFunction":
        return self * region.indicator()

    def sample(self, region: IntervalSet) -> Tuple[np.ndarray, np.ndarray]:
        """(values, weights) describing f on the region, zero-filled where f has no cell."""
        weights = region.overlap(self.lefts, self.rights)
        keep = weights > 0.0
        values, weights = self.values[keep], weights[keep]
        remainder = region.measure - float(weights.sum())
        if remainder > 1e-15 * max(1.0, region.measure):
            values = np.append(values, 0.0)
            weights = np.append(weights, remainder)
        return values, weights

    def integral(self, region: Optional[IntervalSet] = None) -> float:
        if region is None:
            return float(np.dot(self.values, self.widths))
        return float(np.dot(self.values, region.overlap(self.lefts, self.rights)))

    def max_on(self, region: IntervalSet) -> float:
        values, _ = self.sample(region)
        return float(values.max()) if values.size else 0.0

    def support(self) -> IntervalSet:
        nonzero = self.values != 0.0
        return IntervalSet(tuple(zip(self.lefts[nonzero], self.rights[nonzero])))

    def superlevel(self, threshold: float) -> IntervalSet:
        above = self.values > threshold
        return IntervalSet(tuple(zip(self.lefts[above], self.rights[above])))

    def simplified(self) -> "StepFunction":
        """Merge equal neighbouring cells and trim zero cells at both ends."""
        nonzero = np.flatnonzero(self.values != 0.0)
        if nonzero.size == 0:
            return StepFunction.zero()
        first, last = nonzero[0], nonzero[-1]
        bp = self.breakpoints[first : last + 2]
        vals = self.values[first : last + 1]
        keep = np.concatenate(([True], vals[1:] != vals[:-1]))
        new_bp = np.append(bp[:-1][keep], bp[-1])
        return StepFunction(new_bp, vals[keep])

    def translated(self, shift: float) -> "StepFunction":
        return StepFunction(self.breakpoints + shift, self.values)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def to_dict(self) -> Dict[str, Any]:
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StepFunction":
        try:
            return cls(np.asarray(data["breakpoints"], dtype=float), np.asarray(data["values"], dtype=float))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"invalid step function payload: {exc}") from exc


@dataclass(frozen=True, eq=False)
class PointFunction:
    """Function on the points of a finite space with the space's point masses."""

    values: np.ndarray
    mass: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        mass = np.asarray(self.mass, dtype=float)
        if vals.shape != mass.shape or vals.ndim != 1:
            raise DomainError("values and masses must be 1-d arrays of equal length")
        if not np.all(np.isfinite(vals)):
            raise DomainError("point function values must be finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def zero(cls, mass: np.ndarray) -> "PointFunction":
        return cls(np.zeros(np.asarray(mass).size), mass)

    def __call__(self, i: Any) -> Any:
        return self.values[np.asarray(i, dtype=int)]

    def _other_values(self, other: Union["PointFunction", float]) -> Any:
        return other.values if isinstance(other, PointFunction) else float(other)

    def __add__(self, other: "PointFunction") -> "PointFunction":
        return PointFunction(self.values + self._other_values(other), self.mass)

    def __sub__(self, other: "PointFunction") -> "PointFunction":
        return PointFunction(self.values - self._other_values(other), self.mass)

    def __mul__(self, other: Union["PointFunction", float]) -> "PointFunction":
        return PointFunction(self.values * self._other_values(other), self.mass)

    __rmul__ = __mul__

    def __neg__(self) -> "PointFunction":
        return PointFunction(-self.values, self.mass)

    def __abs__(self) -> "PointFunction":
        return PointFunction(np.abs(self.values), self.mass)

    def power(self, q: float) -> "PointFunction":
        return PointFunction(np.power(np.abs(self.values), q), self.mass)

    def maximum(self, other: "PointFunction") -> "PointFunction":
        return PointFunction(np.maximum(self.values, other.values), self.mass)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "PointFunction":
        return PointFunction(np.asarray(fn(self.values), dtype=float), self.mass)

    def floored(self, tau: float) -> "PointFunction":
        return PointFunction(np.maximum(self.values, tau), self.mass)

    def restricted(self, region: PointSet) -> "PointFunction":
        return self * region.indicator()

    def sample(self, region: PointSet) -> Tuple[np.ndarray, np.ndarray]:
        idx = region.index_array
        return self.values[idx], self.mass[idx]

    def integral(self, region: Optional[PointSet] = None) -> float:
        if region is None:
            return float(np.dot(self.values, self.mass))
        values, weights = self.sample(region)
        return float(np.dot(values, weights))

    def max_on(self, region: PointSet) -> float:
        values, _ = self.sample(region)
        return float(values.max()) if values.size else 0.0

    def support(self) -> PointSet:
        return PointSet(tuple(np.flatnonzero(self.values != 0.0)), self.mass)

    def superlevel(self, threshold: float) -> PointSet:
        return PointSet(tuple(np.flatnonzero(self.values > threshold)), self.mass)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def to_dict(self) -> Dict[str, Any]:
        return {"values": self.values.tolist(), "mass": self.mass.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PointFunction":
        try:
            return cls(np.asarray(data["values"], dtype=float), np.asarray(data["mass"], dtype=float))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"invalid point function payload: {exc}") from exc


AnyFunction = Union[StepFunction, PointFunction]
