"""Weights on the line that satisfy both separated bump conditions but not the double one.

Block n carries σ = 1 on J_n = (e^n, e^n + 1) and u = K_n on
I_n = (e^n + n - 1, e^n + n), with K_n = n²·log(e+n)^{-log_power}. Offsets
e^n stay symbolic: every computation runs in block-local coordinates, where
the block window is (0, n), J_n is (0, 1) and I_n is (n - 1, n). Floats at
e^n stop resolving unit cells well before n = 40, so the global layout is
only materialized for n ≤ GLOBAL_LIMIT as a cross-check.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from ..core.bump import BumpReport, ScanFamily
from ..core.orlicz import average, orlicz_norm
from ..core.stepfunctions import IntervalSet, StepFunction
from ..core.young import PowerLog, YoungFunction
from ..errors import ParameterError
from .reports import NormExperimentReport, log_slope

logger = logging.getLogger(__name__)

GLOBAL_LIMIT = 30
BAND_LIMIT = 10.0
PLATEAU_TOLERANCE = 0.2
PLATEAU_EARLY_N = 10
PLATEAU_LATE_N = 100
# e^k must stay a finite float for the long intervals ending in block k
LONG_REGIME_LIMIT = 200
# first n where the double product doubles its n = 4 value sits near 5·10⁴
DIVERGENCE_MIN_N = 100_000
CROSS_CHECK_RTOL = 1e-2

REGIMES = ("within-block", "disjoint", "long")


def block_constant(n: int, log_power: float = 3.0) -> float:
    return n * n * math.log(math.e + n) ** (-log_power)


@dataclass(frozen=True)
class Block:
    n: int
    K: float

    @property
    def window(self) -> IntervalSet:
        return IntervalSet.of((0.0, float(self.n)))

    @property
    def u_interval(self) -> Tuple[float, float]:
        return float(self.n - 1), float(self.n)

    @property
    def sigma_interval(self) -> Tuple[float, float]:
        return 0.0, 1.0

    def u_local(self) -> StepFunction:
        return StepFunction(np.array([0.0, self.n - 1.0, float(self.n)]), np.array([0.0, self.K]))

    def sigma_local(self) -> StepFunction:
        return StepFunction(np.array([0.0, 1.0, float(self.n)]), np.array([1.0, 0.0]))

    def touched(self, lo: float, hi: float) -> Set[str]:
        """Which of J_n ("J") and I_n ("I") the local interval (lo, hi) meets in positive measure."""
        hit = set()
        if min(hi, 1.0) > max(lo, 0.0):
            hit.add("J")
        if min(hi, float(self.n)) > max(lo, self.n - 1.0):
            hit.add("I")
        return hit


@dataclass(frozen=True)
class Counterexample7:
    """Blocks n = 2..n_max, generated lazily."""

    n_max: int
    log_power: float = 3.0
    phi: YoungFunction = field(default_factory=lambda: PowerLog(1.0, 2.0))

    def __post_init__(self) -> None:
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ParameterError(f"n_max must be an integer >= 2, got {self.n_max}")
        if not (math.isfinite(self.log_power) and self.log_power > 0.0):
            raise ParameterError(f"log_power must be positive, got {self.log_power}")
        object.__setattr__(self, "n_max", int(self.n_max))

    def __len__(self) -> int:
        return self.n_max - 1

    def K(self, n: int) -> float:
        return block_constant(n, self.log_power)

    def block(self, n: int) -> Block:
        if not 2 <= n <= self.n_max:
            raise ParameterError(f"block {n} outside 2..{self.n_max}")
        return Block(n, self.K(n))

    def blocks(self) -> Iterator[Block]:
        for n in range(2, self.n_max + 1):
            yield self.block(n)

    @staticmethod
    def gap_log(n: int) -> float:
        """log(e^{n+1} - e^n), the distance between consecutive block starts."""
        return n + math.log(math.e - 1.0)

    def gap_ok(self, n: int) -> bool:
        # e^{n+1} - e^n > n + 1 compared in log space
        return self.gap_log(n) > math.log(n + 1.0)

    def block_row(self, n: int) -> Dict[str, Any]:
        block = self.block(n)
        return {
            "n": n,
            "K": block.K,
            "log_offset": float(n),
            "J_lo": 0.0,
            "J_hi": 1.0,
            "I_lo": n - 1.0,
            "I_hi": float(n),
            "separation": n - 2.0,
            "gap_log": self.gap_log(n),
            "gap_ok": self.gap_ok(n),
        }

    def global_pair(self, n_hi: Optional[int] = None) -> Tuple[StepFunction, StepFunction]:
        """u and σ in global coordinates for blocks 2..n_hi (n_hi ≤ GLOBAL_LIMIT)."""
        n_hi = min(self.n_max, GLOBAL_LIMIT) if n_hi is None else n_hi
        if n_hi > GLOBAL_LIMIT or n_hi > self.n_max:
            raise ParameterError(f"global layout limited to n <= min({GLOBAL_LIMIT}, n_max), got {n_hi}")
        u_cells, sigma_cells = [], []
        for n in range(2, n_hi + 1):
            offset = math.exp(n)
            u_cells.append((offset + n - 1.0, offset + n, self.K(n)))
            sigma_cells.append((offset, offset + 1.0, 1.0))
        return StepFunction.from_cells(u_cells), StepFunction.from_cells(sigma_cells)

    def to_dict(self) -> Dict[str, Any]:
        return {"n_max": self.n_max, "log_power": self.log_power, "phi": self.phi.to_dict()}


def counterexample_build(n_max: int, log_power: float = 3.0, phi: Optional[YoungFunction] = None) -> Counterexample7:
    ce = Counterexample7(n_max, log_power, phi or PowerLog(1.0, 2.0))
    bad = [n for n in range(2, min(ce.n_max, 10_000) + 1) if not ce.gap_ok(n)]
    if bad:
        raise ParameterError(f"blocks overlap at n = {bad[:5]}")
    logger.info("counterexample with %d blocks (log power %g)", len(ce), log_power)
    return ce


def block_samples(n_max: int, dense_until: int = 32, count: int = 40) -> List[int]:
    """Every n up to dense_until, then geometrically spaced up to n_max."""
    dense = list(range(2, min(n_max, dense_until) + 1))
    if n_max <= dense_until:
        return dense
    tail = np.unique(np.round(np.geomspace(dense_until, n_max, count)).astype(int))
    return sorted(set(dense) | {int(n) for n in tail})


@dataclass
class CounterexampleSeries:
    mode: str
    series: List[Tuple[int, BumpReport]]
    report: NormExperimentReport

    @property
    def values(self) -> List[float]:
        return [bump.value for _, bump in self.series]


def _double_product(block: Block, phi: YoungFunction) -> Tuple[float, float]:
    Q = block.window
    return orlicz_norm(block.u_local(), Q, phi), orlicz_norm(block.sigma_local(), Q, phi)


def scan_double(ce: Counterexample7, samples: Optional[Sequence[int]] = None) -> CounterexampleSeries:
    """‖u‖_{Φ,Q_n}‖σ‖_{Φ,Q_n} per block, divided by log(e+n)."""
    samples = list(samples) if samples is not None else block_samples(ce.n_max)
    square = PowerLog(2.0, 2.0)
    global_u, global_sigma = ce.global_pair()
    rows: List[Dict[str, Any]] = []
    series: List[Tuple[int, BumpReport]] = []
    mismatches = []
    for n in samples:
        block = ce.block(n)
        u_norm, sigma_norm = _double_product(block, ce.phi)
        product = u_norm * sigma_norm
        log_n = math.log(math.e + n)
        ab_product = orlicz_norm(block.u_local().power(0.5), block.window, square) * orlicz_norm(
            block.sigma_local().power(0.5), block.window, square
        )
        row: Dict[str, Any] = {
            "instance": n,
            "n": n,
            "size": n,
            "K": block.K,
            "u_norm": u_norm,
            "sigma_norm": sigma_norm,
            "product": product,
            "log_e_n": log_n,
            "ratio": product / log_n,
            "ab_product": ab_product,
            "global_product": "",
        }
        if n <= GLOBAL_LIMIT:
            offset = math.exp(n)
            Q = IntervalSet.of((offset, offset + n))
            global_product = orlicz_norm(global_u, Q, ce.phi) * orlicz_norm(global_sigma, Q, ce.phi)
            row["global_product"] = global_product
            if abs(global_product - product) > CROSS_CHECK_RTOL * product:
                mismatches.append(n)
        rows.append(row)
        series.append((n, BumpReport("double", product, f"Q_{n}", f"block window (0, {n})", 1, block.window)))

    ratios = [row["ratio"] for row in rows]
    band = max(ratios) / min(ratios) if ratios and min(ratios) > 0.0 else math.inf
    by_n = {row["n"]: row["product"] for row in rows}
    largest = rows[-1]["product"] if rows else math.nan
    growth = largest / by_n[4] if 4 in by_n else math.nan
    slope = log_slope([row["n"] for row in rows if row["n"] >= 1000], [row["product"] for row in rows if row["n"] >= 1000])
    checks = {"band": band <= BAND_LIMIT, "global_cross_check": not mismatches}
    notes = []
    if ce.n_max >= DIVERGENCE_MIN_N and 4 in by_n:
        checks["divergence"] = growth >= 2.0 and slope is not None and slope > 0.0
    else:
        notes.append(f"divergence trend asserted only for n_max >= {DIVERGENCE_MIN_N} with n = 4 sampled")
    if mismatches:
        logger.warning("global and local products disagree at n = %s", mismatches)
    report = NormExperimentReport(
        "counterexample-double",
        rows,
        checks,
        notes,
        {"band": band, "growth_over_n4": growth, "tail_slope": slope, "log_power": ce.log_power},
    )
    logger.info("double scan: band %.4g, growth %.4g over %d blocks", band, growth, len(rows))
    return CounterexampleSeries("double", series, report)


def classify_regime(touched: Sequence[int], length: float) -> str:
    """One of REGIMES for an interval of the given length meeting the listed blocks."""
    N = max(1, math.ceil(length))
    if not touched or max(touched) >= N + 2:
        return "disjoint"
    if len(set(touched)) >= 2:
        return "long"
    return "within-block"


@dataclass(frozen=True)
class SeparatedTerms:
    u_norm: float
    u_average: float
    sigma_norm: float
    sigma_average: float

    @property
    def a(self) -> float:
        return self.u_norm * self.sigma_average

    @property
    def b(self) -> float:
        return self.sigma_norm * self.u_average


def _separated_terms(u: StepFunction, sigma: StepFunction, Q: IntervalSet, phi: YoungFunction) -> SeparatedTerms:
    return SeparatedTerms(orlicz_norm(u, Q, phi), average(u, Q), orlicz_norm(sigma, Q, phi), average(sigma, Q))


def _rearranged(values: Sequence[float], length: float) -> StepFunction:
    """Unit cells with the given values packed at the left of (0, length)."""
    count = len(values)
    if count == 0:
        return StepFunction(np.array([0.0, length]), np.array([0.0]))
    breakpoints = np.arange(count + 1, dtype=float)
    cells = np.asarray(values, dtype=float)
    if length > count:
        breakpoints = np.append(breakpoints, length)
        cells = np.append(cells, 0.0)
    return StepFunction(breakpoints, cells)


@dataclass(frozen=True)
class LongInterval:
    """From the start of J_j or I_j to the end of J_k or I_k, block-aligned."""

    j: int
    k: int
    left: str
    right: str

    def length(self) -> float:
        start = math.exp(self.j) + (0.0 if self.left == "J" else self.j - 1.0)
        end = math.exp(self.k) + (1.0 if self.right == "J" else float(self.k))
        return end - start

    def u_blocks(self) -> List[int]:
        last = self.k if self.right == "I" else self.k - 1
        return list(range(self.j, last + 1))

    def sigma_blocks(self) -> List[int]:
        first = self.j if self.left == "J" else self.j + 1
        return list(range(first, self.k + 1))

    def touched(self) -> List[int]:
        return sorted(set(self.u_blocks()) | set(self.sigma_blocks()))


def long_intervals(k: int, starts: int = 12) -> List[LongInterval]:
    if k < 3:
        return []
    js = {int(j) for j in np.round(np.geomspace(2, k - 1, min(starts, k - 2)))} | {k - 1}
    return [LongInterval(j, k, left, right) for j in sorted(js) for left in ("J", "I") for right in ("J", "I")]


def _long_regime(ce: Counterexample7, k: int, counts: Dict[str, int]) -> Dict[str, Any]:
    best: Dict[str, Any] = {"sup_A": 0.0, "sup_B": 0.0, "u_bound": 0.0, "sigma_bound": 0.0, "count": 0, "extremal_A": ""}
    for interval in long_intervals(k):
        length = interval.length()
        regime = classify_regime(interval.touched(), length)
        counts[regime] += 1
        best["count"] += 1
        Q = IntervalSet.of((0.0, length))
        u = _rearranged([ce.K(m) for m in interval.u_blocks()], length)
        sigma = _rearranged([1.0] * len(interval.sigma_blocks()), length)
        terms = _separated_terms(u, sigma, Q, ce.phi)
        N = math.ceil(length)
        log_N = math.log(N)
        best["u_bound"] = max(best["u_bound"], terms.u_norm / (log_N ** 2.5 / math.sqrt(N)))
        best["sigma_bound"] = max(best["sigma_bound"], terms.sigma_average / (log_N / N))
        if terms.a > best["sup_A"]:
            best["sup_A"], best["extremal_A"] = terms.a, f"{interval.left}{interval.j}..{interval.right}{interval.k}"
        best["sup_B"] = max(best["sup_B"], terms.b)
    return best


def separated_samples(n_max: int, count: int = 16) -> List[int]:
    """Every n up to 10, then geometric up to n_max; n = 100 is always kept when reachable."""
    dense = list(range(2, min(n_max, PLATEAU_EARLY_N) + 1))
    if n_max <= PLATEAU_EARLY_N:
        return dense
    tail = {int(n) for n in np.round(np.geomspace(PLATEAU_EARLY_N, n_max, count))}
    if n_max >= PLATEAU_LATE_N:
        tail.add(PLATEAU_LATE_N)
    return sorted(set(dense) | tail)


def scan_separated(ce: Counterexample7, samples: Optional[Sequence[int]] = None, refinements: int = 2) -> CounterexampleSeries:
    """[u,σ]_{A,2} ("A") and [σ,u]_{B,2} ("B") in the rescaled form ‖·‖_Φ × ⨍, per block.

    Each sampled block n contributes its within-block intervals and the long
    intervals ending in block n; intervals meeting a single I_n or J_n are
    the disjoint regime and must give exactly zero.
    """
    samples = list(samples) if samples is not None else separated_samples(ce.n_max)
    rows: List[Dict[str, Any]] = []
    series: List[Tuple[int, BumpReport]] = []
    counts = {regime: 0 for regime in REGIMES}
    disjoint_nonzero = 0
    skipped_long: List[int] = []
    running_a = running_b = 0.0
    for n in samples:
        block = ce.block(n)
        u, sigma = block.u_local(), block.sigma_local()
        family = ScanFamily.from_points([0.0, 1.0, n - 1.0, float(n)], refinements)
        sup_a = sup_b = 0.0
        extremal_a: Any = None
        for Q, (lo, hi) in zip(family.regions, family.labels):
            regime = classify_regime([n] if block.touched(lo, hi) else [], hi - lo)
            counts[regime] += 1
            terms = _separated_terms(u, sigma, Q, ce.phi)
            if regime == "disjoint":
                if terms.a != 0.0 or terms.b != 0.0:
                    disjoint_nonzero += 1
                continue
            if terms.a > sup_a:
                sup_a, extremal_a = terms.a, (lo, hi)
            sup_b = max(sup_b, terms.b)
        if n <= LONG_REGIME_LIMIT:
            long = _long_regime(ce, n, counts)
        else:
            long = {"sup_A": 0.0, "sup_B": 0.0, "u_bound": 0.0, "sigma_bound": 0.0, "count": 0, "extremal_A": ""}
            skipped_long.append(n)
        evaluated = len(family) + long["count"]
        best_a, best_b = max(sup_a, long["sup_A"]), max(sup_b, long["sup_B"])
        running_a, running_b = max(running_a, best_a), max(running_b, best_b)
        log_n = math.log(math.e + n)
        rows.append(
            {
                "instance": n,
                "n": n,
                "size": n,
                "block_sup_A": sup_a,
                "block_sup_B": sup_b,
                "block_times_log": sup_a * log_n,
                "long_sup_A": long["sup_A"],
                "long_sup_B": long["sup_B"],
                "long_intervals": long["count"],
                "u_bound_ratio": long["u_bound"],
                "sigma_bound_ratio": long["sigma_bound"],
                "sup_A": best_a,
                "sup_B": best_b,
                "running_sup_A": running_a,
                "running_sup_B": running_b,
                "ratio": best_a,
            }
        )
        extremal = extremal_a if sup_a >= long["sup_A"] else long["extremal_A"]
        series.append((n, BumpReport("separated-A", best_a, extremal, family.description, evaluated)))

    def scale_sup(key: str, n_from: int) -> float:
        # running sups are nondecreasing in n, so the sup over scales n >= n_from is the last one
        late = [row[key] for row in rows if row["n"] >= n_from]
        return max(late) if late else math.nan

    def plateau(key: str) -> bool:
        early = max((row[key] for row in rows if row["n"] <= PLATEAU_EARLY_N), default=0.0)
        late = scale_sup(key, PLATEAU_LATE_N)
        return early > 0.0 and late <= (1.0 + PLATEAU_TOLERANCE) * early

    block_slope = log_slope([row["n"] for row in rows], [row["block_sup_A"] for row in rows])
    checks: Dict[str, bool] = {}
    notes: List[str] = []
    extras: Dict[str, Any] = {"regime_counts": counts, "log_power": ce.log_power}
    if rows and rows[-1]["n"] >= PLATEAU_LATE_N:
        for side in ("A", "B"):
            key = f"running_sup_{side}"
            checks[f"plateau_{side}"] = plateau(key)
            extras[f"sup_{side}_from_{PLATEAU_EARLY_N}"] = scale_sup(key, PLATEAU_EARLY_N)
            extras[f"sup_{side}_from_{PLATEAU_LATE_N}"] = scale_sup(key, PLATEAU_LATE_N)
    else:
        notes.append(f"plateau asserted only when blocks n >= {PLATEAU_LATE_N} are sampled")
    if skipped_long:
        notes.append(f"long intervals evaluated for blocks n <= {LONG_REGIME_LIMIT}; within-block regime only above")
        extras["long_regime_limit"] = LONG_REGIME_LIMIT
    checks.update({
        "disjoint_regime_zero": disjoint_nonzero == 0,
        "block_sup_decreasing": block_slope is None or block_slope < 0.0,
        "long_interval_bounds": all(row["u_bound_ratio"] <= BAND_LIMIT and row["sigma_bound_ratio"] <= BAND_LIMIT for row in rows),
    })
    report = NormExperimentReport("counterexample-separated", rows, checks, notes, extras)
    logger.info("separated scan: sups %.4g / %.4g, regimes %s", running_a, running_b, counts)
    return CounterexampleSeries("separated", series, report)


def counterexample_scan(ce: Counterexample7, mode: str = "double", samples: Optional[Sequence[int]] = None) -> CounterexampleSeries:
    if mode == "double":
        return scan_double(ce, samples)
    if mode == "separated":
        return scan_separated(ce, samples)
    raise ParameterError(f"unknown counterexample mode {mode!r}; expected 'double' or 'separated'")
