"""Discretized Hilbert transform of step functions."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ..core.bump import ScanFamily, WeightPair, bump_double, bump_separated, bump_separated_dual, dual_exponent
from ..core.space import line_grid
from ..core.stepfunctions import IntervalSet, StepFunction
from ..core.young import YoungFunction
from ..errors import DomainError, ParameterError
from .instances import Instance, random_step_function, random_weight_pair, seeded_instances
from .reports import NormExperimentReport, merge_reports, run_suite
from .theorems import conjugate_constants, log_bump_pair

logger = logging.getLogger(__name__)


def _cells(f: StepFunction) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    keep = f.values != 0.0
    return f.lefts[keep], f.rights[keep], f.values[keep]


def hilbert_point(f: StepFunction, x: Any) -> np.ndarray:
    """Hf(x) = (1/π) p.v.∫ f(y)/(x−y) dy = (1/π) Σ c_j log|(x−a_j)/(x−b_j)|.

    Undefined (nan) at breakpoints of f.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a, b, c = _cells(f)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = c[None, :] * (np.log(np.abs(x[:, None] - a[None, :])) - np.log(np.abs(x[:, None] - b[None, :])))
        out = terms.sum(axis=1) / math.pi
    singular = np.isin(x, np.concatenate([a, b]))
    out[singular] = np.nan
    return out


def _antiderivative(s: np.ndarray) -> np.ndarray:
    # ∫ log|s| ds = s log|s| − s, continuous at 0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(s == 0.0, 0.0, s * np.log(np.abs(s)) - s)


def cell_averages(f: StepFunction, lefts: np.ndarray, rights: np.ndarray) -> np.ndarray:
    """Exact averages of Hf over the cells [lefts, rights)."""
    a, b, c = _cells(f)
    width = (rights - lefts)[:, None]

    def mean_log(points: np.ndarray) -> np.ndarray:
        return (_antiderivative(rights[:, None] - points[None, :]) - _antiderivative(lefts[:, None] - points[None, :])) / width

    return (mean_log(a) - mean_log(b)) @ c / math.pi


@dataclass(frozen=True, eq=False)
class HilbertResult:
    values: StepFunction
    collar: IntervalSet
    cell_width: float

    @property
    def valid(self) -> IntervalSet:
        return self.values.domain.difference(self.collar)

    def valid_cells(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        lefts, rights = self.values.lefts, self.values.rights
        keep = ~self.collar.contains(0.5 * (lefts + rights))
        return lefts[keep], rights[keep], self.values.values[keep]

    def to_dict(self) -> Dict[str, Any]:
        return {"values": self.values.to_dict(), "collar": self.collar.to_dict(), "cell_width": self.cell_width}


def hilbert_apply(
    f: StepFunction,
    cell_width: Optional[float] = None,
    pad: float = 1.0,
    center: Optional[float] = None,
    window: Optional[Tuple[float, float]] = None,
) -> HilbertResult:
    """Cell averages of Hf on a uniform grid, with the principal-value collar marked.

    The grid has step ``cell_width`` (default: a quarter of the smallest cell of
    f), is symmetric about ``center`` when given, and covers the support of f
    padded by ``pad`` unless an explicit window is passed. The collar is the
    union of (x − h, x + h) over the breakpoints x of f.
    """
    support = f.support()
    if support.is_empty:
        raise DomainError("the Hilbert transform needs a function with nonzero support")
    h = float(cell_width) if cell_width is not None else float(np.min(f.widths)) / 4.0
    if not (math.isfinite(h) and h > 0.0):
        raise ParameterError(f"cell width must be positive, got {cell_width}")
    lo, hi = window if window is not None else (support.bounds[0] - pad, support.bounds[1] + pad)
    if center is None:
        k_lo, k_hi = math.floor(lo / h), math.ceil(hi / h)
        breakpoints = h * np.arange(k_lo, k_hi + 1, dtype=float)
    else:
        reach = math.ceil(max(center - lo, hi - center) / h)
        steps = h * np.arange(1, reach + 1, dtype=float)
        breakpoints = np.concatenate([center - steps[::-1], [center], center + steps])
    lefts, rights = breakpoints[:-1], breakpoints[1:]
    values = cell_averages(f, lefts, rights)
    jumps = f.breakpoints[np.abs(np.diff(np.concatenate([[0.0], f.values, [0.0]]))) > 0.0]
    collar = IntervalSet(tuple((float(x - h), float(x + h)) for x in jumps))
    logger.debug("hilbert transform on %d cells (h=%g), collar %.4g", lefts.size, h, collar.measure)
    return HilbertResult(StepFunction(breakpoints, values), collar, h)


def weighted_lp(result: HilbertResult, u: StepFunction, p: float) -> float:
    """(∫ |Hf|^p u)^{1/p} from the cell averages, collar cells included."""
    weighted = result.values.power(p) * u
    return weighted.integral() ** (1.0 / p)


def weighted_weak_lp(result: HilbertResult, u: StepFunction, p: float) -> float:
    """sup_λ λ·u{|Hf| ≥ λ}^{1/p}, with λ swept over the cell averages."""
    values = result.values
    mass = np.array([u.integral(IntervalSet(((lo, hi),))) for lo, hi in zip(values.lefts, values.rights)])
    order = np.argsort(-np.abs(values.values), kind="stable")
    levels = np.abs(values.values[order])
    cumulative = np.cumsum(mass[order])
    positive = levels > 0.0
    if not np.any(positive):
        return 0.0
    return float(np.max(levels[positive] * cumulative[positive] ** (1.0 / p)))


def symmetry_defect(result: HilbertResult, center: float, parity: int = -1) -> float:
    """max |Hf(c+s) − parity·Hf(c−s)| over mirrored cells; parity −1 tests oddness."""
    breakpoints = result.values.breakpoints
    if not np.allclose(breakpoints + breakpoints[::-1], 2.0 * center, rtol=0.0, atol=1e-12 * max(1.0, abs(center))):
        raise DomainError(f"evaluation grid is not symmetric about {center}")
    values = result.values.values
    return float(np.max(np.abs(values - parity * values[::-1])))


def closed_form_interval(x: Any, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """H(χ_(lo, hi))(x) = (1/π) log|(x − lo)/(x − hi)|."""
    x = np.asarray(x, dtype=float)
    return np.log(np.abs((x - lo) / (x - hi))) / math.pi


CLOSED_FORM_TOLERANCE = 1e-6
SYMMETRY_TOLERANCE = 1e-12


def closed_form_defect(result: HilbertResult, lo: float = -1.0, hi: float = 1.0) -> float:
    """Largest gap between the computed cell averages of H(χ_(lo, hi)) and quadrature of the closed form, collar excluded."""
    worst = 0.0
    for left, right, value in zip(*result.valid_cells()):
        exact, _ = integrate.quad(closed_form_interval, left, right, epsabs=1e-13, epsrel=1e-12, limit=200)
        worst = max(worst, abs(value - exact / (right - left)))
    return worst


def hilbert_sanity(cell_width: float = 1.0 / 64.0, reach: float = 3.0) -> NormExperimentReport:
    """H(χ_(-1,1)) against its closed form, and oddness of H of an even function."""
    f = StepFunction.indicator(-1.0, 1.0)
    result = hilbert_apply(f, cell_width=cell_width, center=0.0, window=(-reach, reach))
    closed = closed_form_defect(result)
    odd = symmetry_defect(result, 0.0, parity=-1)
    report = NormExperimentReport("hilbert:sanity")
    report.rows.append(
        {"instance": "indicator", "size": result.values.values.size, "closed_form_defect": closed, "symmetry_defect": odd}
    )
    report.checks["closed_form"] = closed <= CLOSED_FORM_TOLERANCE
    report.checks["antisymmetry"] = odd <= SYMMETRY_TOLERANCE
    return report


def check_hilbert_pair(
    pair: WeightPair,
    A: YoungFunction,
    B: YoungFunction,
    p: float,
    f: StepFunction,
    level: int = 5,
    instance: Any = 0,
) -> NormExperimentReport:
    """‖H(fσ)‖_{L^p(u)} / (dyadic double bump × conjugate constants × ‖f‖_{L^p(σ)}).

    The same transform is also measured against the separated bumps: the weak
    norm ‖H(fσ)‖_{L^{p,∞}(u)} over [u,σ]_{A,p}·‖f‖_{L^p(σ)} and the strong
    norm over ([u,σ]_{A,p} + [σ,u]_{B,p'})·‖f‖_{L^p(σ)}.
    """
    a_bar_bp, b_bar_bp = conjugate_constants(A, B, p)
    lo, hi = pair.window.bounds
    result = hilbert_apply(f * pair.sigma, cell_width=(hi - lo) / 2 ** (level + 2), window=(lo, hi))
    lhs = weighted_lp(result, pair.u, p)
    weak = weighted_weak_lp(result, pair.u, p)
    family = ScanFamily.from_grid(line_grid(0.0, 0, level, window=pair.window))
    bump = bump_double(pair, A, B, p, family).value
    sep_a = bump_separated(pair, A, p, family).value
    sep_b = bump_separated_dual(pair, B, p, family).value
    norm_f = ((f.power(p) * pair.sigma).integral()) ** (1.0 / p)
    rhs = bump * a_bar_bp ** (1.0 / dual_exponent(p)) * b_bar_bp ** (1.0 / p) * norm_f
    ratio = lhs / rhs if rhs > 0.0 else math.inf
    weak_rhs = sep_a * norm_f
    strong_rhs = (sep_a + sep_b) * norm_f
    report = NormExperimentReport(f"hilbert:{instance}")
    report.rows.append(
        {
            "instance": instance,
            "p": p,
            "size": 2 ** level,
            "lhs": lhs,
            "rhs": rhs,
            "bump": bump,
            "ratio": ratio,
            "weak": weak,
            "bump_a": sep_a,
            "bump_b": sep_b,
            "separated_weak_ratio": weak / weak_rhs if weak_rhs > 0.0 else math.inf,
            "separated_strong_ratio": lhs / strong_rhs if strong_rhs > 0.0 else math.inf,
        }
    )
    row = report.rows[-1]
    report.checks["finite"] = math.isfinite(ratio)
    report.checks["separated_finite"] = math.isfinite(row["separated_weak_ratio"]) and math.isfinite(
        row["separated_strong_ratio"]
    )
    report.checks["weak_below_strong"] = weak <= lhs * (1.0 + 1e-9)
    return report


def _hilbert_task(args: Tuple[Instance, float]) -> NormExperimentReport:
    instance, delta = args
    rng = np.random.default_rng(instance.seed)
    pair = random_weight_pair(rng, instance.level, instance.oscillation)
    f = random_step_function(rng, instance.level)
    A, B = log_bump_pair(instance.p, delta)
    return check_hilbert_pair(pair, A, B, instance.p, f, instance.level, instance=instance.seed)


def hilbert_suite(
    count: int = 20,
    ps: Sequence[float] = (1.5, 2.0, 3.0),
    levels: Sequence[int] = (3, 4, 5),
    delta: float = 1.0,
    oscillation: float = 1.0,
    seed: int = 0,
    workers: int = 1,
) -> NormExperimentReport:
    instances = seeded_instances(count, ps, levels, oscillation, seed)
    parts: List[NormExperimentReport] = [hilbert_sanity()]
    parts.extend(run_suite(_hilbert_task, [(inst, delta) for inst in instances], workers))
    report = merge_reports("hilbert", parts)
    logger.info("hilbert suite: %d rows, max ratio %.6g, passed=%s", len(report.rows), report.max_ratio, report.passed)
    return report
