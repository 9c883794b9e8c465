"""Instance suites checking the two-weight inequalities for sparse operators.

Each ``check_*`` evaluates one instance and returns a one-instance report;
the ``*_suite`` functions sweep seeded instances and merge the rows in seed
order. Constants in the inequalities are not explicit, so every assertion is
a boundedness or trend statement over the suite.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.bump import (
    ScanFamily,
    WeightPair,
    bump_double,
    bump_double_uv,
    bump_separated,
    bump_separated_dual,
    dual_exponent,
)
from ..core.orlicz import average
from ..core.space import DyadicGrid, finite_grid, line_grid, random_plane_space
from ..core.sparse import (
    SparseFamily,
    bad_part_leakage,
    cz_cubes,
    cz_decompose,
    dyadic_maximal,
    maximal_dominated_by_sparse,
    sparse_apply,
)
from ..core.stepfunctions import AnyFunction, IntervalSet, StepFunction
from ..core.young import (
    LINEAR,
    Dilated,
    LogBump,
    Power,
    PowerLog,
    YoungFunction,
    bp_constant,
    complementary,
    holder_compatible,
)
from ..errors import InvariantError, ParameterError, PreconditionError
from . import norms
from .instances import (
    Instance,
    instance_family,
    random_point_function,
    random_step_function,
    random_weight,
    random_weight_pair,
    seeded_instances,
)
from .reports import NormExperimentReport, log_slope, merge_reports, run_suite

logger = logging.getLogger(__name__)

T_GRID = tuple(np.geomspace(1.0, 1e10, 61))
TREND_LIMIT = 0.05
LSUT_BAND = 20.0
CHAIN_FACTOR = 8.0
F_SEED_OFFSET = 104_729


def log_bump_pair(p: float, delta: float) -> Tuple[LogBump, LogBump]:
    """A = t^p·log(e+t)^{p-1+δ} and B = t^{p'}·log(e+t)^{p'-1+δ}."""
    return LogBump(p, delta), LogBump(dual_exponent(p), delta)


@lru_cache(maxsize=64)
def conjugate_constants(A: YoungFunction, B: YoungFunction, p: float) -> Tuple[float, float]:
    """([Ā]_{B_p'}, [B̄]_{B_p}); PreconditionError when either diverges."""
    a_bar = bp_constant(complementary(A), dual_exponent(p))
    b_bar = bp_constant(complementary(B), p)
    if a_bar.diverges or b_bar.diverges:
        raise PreconditionError(f"conjugate bumps must lie in B_p' and B_p, got {a_bar.value} and {b_bar.value}")
    return a_bar.value, b_bar.value


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0.0:
        return lhs / rhs
    return 0.0 if lhs == 0.0 else math.inf


def _lp(f: AnyFunction, p: float, weight: Optional[AnyFunction] = None) -> float:
    integrand = f.power(p) if weight is None else f.power(p) * weight
    return integrand.integral() ** (1.0 / p)


def _test_functions(grid: DyadicGrid, seed: int, count: int) -> List[StepFunction]:
    rng = np.random.default_rng(seed + F_SEED_OFFSET)
    level = max(1, grid.k_max)
    window = grid.extent.bounds
    return [random_step_function(rng, level, window) for _ in range(count)]


def _pair_for(instance: Instance) -> WeightPair:
    rng = np.random.default_rng(instance.seed)
    return random_weight_pair(rng, instance.level, instance.oscillation)


def _suite(
    tag: str,
    task: Callable[[Any], NormExperimentReport],
    items: Sequence[Any],
    workers: int,
) -> NormExperimentReport:
    parts = run_suite(task, items, workers)
    report = merge_reports(tag, parts)
    logger.info("%s: %d rows, max ratio %.6g, passed=%s", tag, len(report.rows), report.max_ratio, report.passed)
    return report


def _size_trend(report: NormExperimentReport, key: str = "ratio") -> Optional[float]:
    """Slope of log(max row[key] per size) against log(size)."""
    best: Dict[int, float] = {}
    for row in report.rows:
        ratio = row.get(key)
        if ratio is not None and math.isfinite(ratio) and ratio > 0.0:
            best[row["size"]] = max(best.get(row["size"], 0.0), ratio)
    sizes = sorted(best)
    return log_slope(sizes, [best[s] for s in sizes])


# double bump


def check_thm_double(
    S: SparseFamily,
    pair: WeightPair,
    A: YoungFunction,
    B: YoungFunction,
    p: float,
    seed: int = 0,
    instance: Any = 0,
) -> NormExperimentReport:
    """Strong norm of T^S(·σ) against [u,σ]^D_{A,B,p}·[Ā]_{B_p'}^{1/p'}·[B̄]_{B_p}^{1/p}.

    Also checks, for a seeded pair (f, g),
    Σ_Q ⨍_Q fσ·⨍_Q ug·μ(Q) ≤ 8·[u,σ]^D·∫ M_B̄(fσ^{1/p})·M_Ā(gu^{1/p'}),
    records ‖M_Φ f‖_p / ([Φ]_{B_p}^{1/p}‖f‖_p) for Φ = t^q, q = (1+p)/2, and compares
    [[u,v]]^D_{A,B,p} with [u,σ]^D for v = σ^{1-p}, where ‖T^S f‖_{L^p(u)} is
    measured against ‖f‖_{L^p(v)}.
    """
    q = dual_exponent(p)
    a_bar_bp, b_bar_bp = conjugate_constants(A, B, p)
    grid = S.grid
    report = NormExperimentReport(f"double:{instance}")
    bump = bump_double(pair, A, B, p, ScanFamily.from_grid(grid))
    if bump.diverges:
        report.notes.append(f"instance {instance}: infinite double bump, skipped")
        return report

    strong = norms.strong_norm(S, pair, p, seed=seed)
    rhs = bump.value * a_bar_bp ** (1.0 / q) * b_bar_bp ** (1.0 / p)

    f, g = _test_functions(grid, seed, 2)
    chain_lhs = sum(
        average(f * pair.sigma, c.members) * average(g * pair.u, c.members) * c.measure for c in S.members()
    )
    m_b = dyadic_maximal(f * pair.sigma.power(1.0 / p), grid, complementary(B))
    m_a = dyadic_maximal(g * pair.u.power(1.0 / q), grid, complementary(A))
    chain_rhs = CHAIN_FACTOR * bump.value * (m_b * m_a).integral()

    inner = Power(0.5 * (1.0 + p))
    maximal_ratio = _ratio(
        _lp(dyadic_maximal(f, grid, inner), p), bp_constant(inner, p).value ** (1.0 / p) * _lp(f, p)
    )

    # same inequality for the pair (u, v) with v = σ^{1-p}
    v = pair.sigma.power(1.0 - p)
    uv_bump = bump_double_uv(pair.u, v, A, B, p, ScanFamily.from_grid(grid)).value
    uv_ratio = _ratio(
        _lp(sparse_apply(S, f), p, pair.u),
        uv_bump * a_bar_bp ** (1.0 / q) * b_bar_bp ** (1.0 / p) * _lp(f, p, v),
    )

    row = {
        "instance": instance,
        "p": p,
        "size": len(grid.leaves()),
        "lhs": strong.estimate,
        "lower_bound": strong.lower_bound,
        "gap": strong.gap,
        "converged": strong.converged,
        "bump": bump.value,
        "abar_bp": a_bar_bp,
        "bbar_bp": b_bar_bp,
        "rhs": rhs,
        "ratio": _ratio(strong.estimate, rhs),
        "chain_lhs": chain_lhs,
        "chain_rhs": chain_rhs,
        "chain_ok": chain_lhs <= chain_rhs * (1.0 + 1e-9),
        "maximal_ratio": maximal_ratio,
        "uv_bump": uv_bump,
        "uv_ratio": uv_ratio,
    }
    report.rows.append(row)
    report.checks["finite"] = math.isfinite(row["ratio"])
    report.checks["duality_chain"] = row["chain_ok"]
    report.checks["maximal_bounded"] = math.isfinite(maximal_ratio)
    report.checks["uv_form_agrees"] = abs(uv_bump - bump.value) <= 1e-8 * bump.value and math.isfinite(uv_ratio)
    return report


def _double_task(args: Tuple[Instance, float]) -> NormExperimentReport:
    instance, delta = args
    _, S = instance_family(instance)
    A, B = log_bump_pair(instance.p, delta)
    return check_thm_double(S, _pair_for(instance), A, B, instance.p, seed=instance.seed, instance=instance.seed)


def double_suite(
    count: int = 50,
    ps: Sequence[float] = (1.5, 2.0, 3.0),
    levels: Sequence[int] = (3, 4, 5),
    delta: float = 1.0,
    oscillation: float = 1.0,
    seed: int = 0,
    workers: int = 1,
) -> NormExperimentReport:
    instances = seeded_instances(count, ps, levels, oscillation, seed)
    report = _suite("double", _double_task, [(inst, delta) for inst in instances], workers)
    slope = _size_trend(report)
    report.extras["size_slope"] = slope
    report.checks["size_trend"] = slope is None or slope <= TREND_LIMIT
    return report


# separated bumps


def check_thm_separated(
    S: SparseFamily,
    pair: WeightPair,
    A: YoungFunction,
    B: YoungFunction,
    p: float,
    seed: int = 0,
    instance: Any = 0,
) -> NormExperimentReport:
    """Weak norm of T^S(·σ) against [u,σ]_{A,p}, strong norm against [u,σ]_{A,p} + [σ,u]_{B,p'}."""
    family = ScanFamily.from_grid(S.grid)
    sep_a = bump_separated(pair, A, p, family)
    sep_b = bump_separated_dual(pair, B, p, family)
    report = NormExperimentReport(f"separated:{instance}")
    if sep_a.diverges or sep_b.diverges:
        report.notes.append(f"instance {instance}: infinite separated bump, skipped")
        return report

    strong = norms.strong_norm(S, pair, p, seed=seed)
    weak = norms.weak_norm(S, pair, p, seed=seed)
    forward, dual = norms.testing_constants(S, pair, p)
    row = {
        "instance": instance,
        "p": p,
        "size": len(S.grid.leaves()),
        "weak": weak,
        "strong": strong.estimate,
        "bump_a": sep_a.value,
        "bump_b": sep_b.value,
        "testing": forward,
        "dual_testing": dual,
        "weak_ratio": _ratio(weak, sep_a.value),
        "ratio": _ratio(strong.estimate, sep_a.value + sep_b.value),
    }
    report.rows.append(row)
    report.checks["finite"] = math.isfinite(row["ratio"]) and math.isfinite(row["weak_ratio"])
    report.checks["weak_below_strong"] = weak <= strong.estimate * (1.0 + 1e-9)
    return report


def _separated_task(args: Tuple[Instance, float]) -> NormExperimentReport:
    instance, delta = args
    _, S = instance_family(instance)
    A, B = log_bump_pair(instance.p, delta)
    return check_thm_separated(S, _pair_for(instance), A, B, instance.p, seed=instance.seed, instance=instance.seed)


def separated_suite(
    count: int = 50,
    ps: Sequence[float] = (1.5, 2.0, 3.0),
    levels: Sequence[int] = (3, 4, 5),
    delta: float = 1.0,
    oscillation: float = 1.0,
    seed: int = 0,
    workers: int = 1,
) -> NormExperimentReport:
    instances = seeded_instances(count, ps, levels, oscillation, seed)
    report = _suite("separated", _separated_task, [(inst, delta) for inst in instances], workers)
    weak_slope = _size_trend(report, "weak_ratio")
    strong_slope = _size_trend(report)
    report.extras.update({"weak_slope": weak_slope, "strong_slope": strong_slope})
    report.checks["weak_trend"] = weak_slope is None or weak_slope <= TREND_LIMIT
    report.checks["strong_trend"] = strong_slope is None or strong_slope <= TREND_LIMIT
    return report


# weak (1,1)


@lru_cache(maxsize=32)
def weak11_precondition(Phi: YoungFunction, q: float) -> float:
    """[Ā_Φ]_{B_q'} for A_Φ(t) = Φ(t^q); PreconditionError when infinite."""
    report = bp_constant(complementary(Dilated(Phi, q)), dual_exponent(q))
    if report.diverges:
        raise PreconditionError(f"the conjugate of Phi(t^{q}) is not in B_q'")
    return report.value


def _level_mass(Tf: StepFunction, u: StepFunction, level: float) -> float:
    above = Tf.values >= level
    return u.integral(IntervalSet(tuple(zip(Tf.lefts[above], Tf.rights[above]))))


def check_thm_weak11(
    S: SparseFamily,
    u: StepFunction,
    Phi: YoungFunction = PowerLog(1.0, 2.0),
    q: float = 2.0,
    fs: Optional[Sequence[StepFunction]] = None,
    seed: int = 0,
    instance: Any = 0,
    max_cz_levels: int = 8,
) -> NormExperimentReport:
    """λ·u{T^S f ≥ λ} / ∫ f·M_Φ^D u over the output levels λ, plus exact vanishing of T^S b off Ω."""
    bp = weak11_precondition(Phi, q)
    grid = S.grid
    fs = list(fs) if fs is not None else _test_functions(grid, seed, 3)
    maximal_u = dyadic_maximal(u, grid, Phi)
    report = NormExperimentReport(f"weak11:{instance}")
    leaks = 0
    checked = 0
    for index, f in enumerate(fs):
        denominator = (f * maximal_u).integral()
        Tf = sparse_apply(S, f)
        levels = np.unique(Tf.values[Tf.values > 0.0])
        for lam in levels:
            lhs = lam * _level_mass(Tf, u, lam)
            report.rows.append(
                {
                    "instance": instance,
                    "f": index,
                    "size": len(grid.leaves()),
                    "lambda": float(lam),
                    "lhs": lhs,
                    "rhs": denominator,
                    "ratio": _ratio(lhs, denominator),
                }
            )
        floor = average(abs(f), grid.extent)
        admissible = [lam for lam in levels if lam >= floor]
        step = max(1, len(admissible) // max_cz_levels)
        for lam in admissible[::step]:
            stopping = cz_cubes(f, grid, LINEAR, float(lam))
            checked += 1
            if bad_part_leakage(f, S, stopping) != 0:
                leaks += 1
    report.checks["finite"] = all(math.isfinite(row["ratio"]) for row in report.rows)
    report.checks["bad_parts_vanish"] = leaks == 0

    # [[u, M_Φ u]] for A_Φ = Φ(t^q) and B = t^{(rq)'} with 1/q < r < 1 never exceeds 1
    r = 0.5 * (1.0 + 1.0 / q)
    uv = bump_double_uv(u, maximal_u, Dilated(Phi, q), Power(dual_exponent(r * q)), q, ScanFamily.from_grid(grid)).value
    report.checks["uv_bump_at_most_one"] = uv <= 1.0 + 1e-8
    report.extras.update({"abar_phi_bp": bp, "cz_levels_checked": checked, "leaks": leaks, "uv_bump": uv})
    return report


def _weak11_task(args: Tuple[Instance, YoungFunction, float]) -> NormExperimentReport:
    instance, Phi, q = args
    _, S = instance_family(instance)
    u = random_weight(np.random.default_rng(instance.seed), instance.level, instance.oscillation)
    return check_thm_weak11(S, u, Phi, q, seed=instance.seed, instance=instance.seed)


def weak11_suite(
    count: int = 50,
    levels: Sequence[int] = (3, 4, 5),
    Phi: YoungFunction = PowerLog(1.0, 2.0),
    q: float = 2.0,
    oscillation: float = 1.0,
    seed: int = 0,
    workers: int = 1,
) -> NormExperimentReport:
    weak11_precondition(Phi, q)
    instances = seeded_instances(count, (2.0,), levels, oscillation, seed)
    report = _suite("weak11", _weak11_task, [(inst, Phi, q) for inst in instances], workers)
    report.extras["lambda_slope"] = log_slope([row["lambda"] for row in report.rows], report.ratios)
    return report


# Orlicz maximal bound with a separated bump


def lemma61_parameters(p: float, delta: float, epsilon: Optional[float] = None) -> Dict[str, Any]:
    """Φ = t·log(e+t)^ε, q = 1 + ε/2, η = δ − εp and C = t^{p'}·log(e+t)^{-1-(p'-1)η}."""
    epsilon = delta / (2.0 * p) if epsilon is None else float(epsilon)
    if not 0.0 < epsilon < delta / p:
        raise ParameterError(f"epsilon must lie in (0, delta/p) = (0, {delta / p:.6g}), got {epsilon}")
    q = dual_exponent(p)
    eta = delta - epsilon * p
    return {
        "epsilon": epsilon,
        "q": 1.0 + epsilon / 2.0,
        "eta": eta,
        "Phi": PowerLog(1.0, epsilon),
        "C": PowerLog(q, -1.0 - (q - 1.0) * eta),
    }


@lru_cache(maxsize=32)
def _lemma61_constants(p: float, delta: float, epsilon: float) -> Tuple[float, float]:
    params = lemma61_parameters(p, delta, epsilon)
    A = LogBump(p, delta)
    holder = holder_compatible(params["Phi"], A, params["C"], T_GRID)
    bp = bp_constant(params["C"], dual_exponent(p))
    return holder, bp.value


def check_lemma61(
    pair: WeightPair,
    A: LogBump,
    p: float,
    epsilon: Optional[float] = None,
    grid: Optional[DyadicGrid] = None,
    fs: Optional[Sequence[StepFunction]] = None,
    seed: int = 0,
    instance: Any = 0,
) -> NormExperimentReport:
    """‖M_Φ^D(fu)‖_{L^p'(σ)} / ([u,σ]^D_{A,p}·[C]_{B_p'}^{1/p'}·‖f‖_{L^p'(u)})."""
    if not isinstance(A, LogBump) or A.p != p:
        raise ParameterError("the maximal bound is set up for A = LogBump(p, delta)")
    params = lemma61_parameters(p, A.delta, epsilon)
    holder, bp_c = _lemma61_constants(p, A.delta, params["epsilon"])
    q = dual_exponent(p)
    grid = grid or line_grid(0.0, 0, 5, window=pair.window)
    fs = list(fs) if fs is not None else _test_functions(grid, seed, 3)
    bump = bump_separated(pair, A, p, ScanFamily.from_grid(grid)).value
    report = NormExperimentReport(f"lemma61:{instance}")
    for index, f in enumerate(fs):
        lhs = _lp(dyadic_maximal(f * pair.u, grid, params["Phi"]), q, pair.sigma)
        rhs = bump * bp_c ** (1.0 / q) * _lp(f, q, pair.u)
        report.rows.append(
            {
                "instance": instance,
                "f": index,
                "p": p,
                "size": len(grid.leaves()),
                "lhs": lhs,
                "rhs": rhs,
                "bump": bump,
                "ratio": _ratio(lhs, rhs),
            }
        )
    report.checks["holder_bounded"] = math.isfinite(holder)
    report.checks["c_in_bp"] = math.isfinite(bp_c)
    report.checks["finite"] = all(math.isfinite(row["ratio"]) for row in report.rows)
    report.extras.update(
        {"epsilon": params["epsilon"], "q": params["q"], "eta": params["eta"], "holder": holder, "c_bp": bp_c}
    )
    return report


def _lemma61_task(args: Tuple[Instance, Optional[float]]) -> NormExperimentReport:
    instance, epsilon = args
    pair = _pair_for(instance)
    grid = line_grid(0.0, 0, instance.level)
    A = LogBump(instance.p, instance.delta)
    return check_lemma61(pair, A, instance.p, epsilon, grid, seed=instance.seed, instance=instance.seed)


def lemma61_suite(
    count: int = 50,
    ps: Sequence[float] = (1.5, 2.0, 3.0),
    levels: Sequence[int] = (3, 4, 5),
    delta: float = 1.0,
    epsilon: Optional[float] = None,
    oscillation: float = 1.0,
    seed: int = 0,
    workers: int = 1,
) -> NormExperimentReport:
    instances = [
        Instance(inst.seed, inst.p, inst.level, inst.oscillation, delta)
        for inst in seeded_instances(count, ps, levels, oscillation, seed)
    ]
    return _suite("lemma61", _lemma61_task, [(inst, epsilon) for inst in instances], workers)


# weak/strong equivalence through testing conditions


def check_lsut(S: SparseFamily, pair: WeightPair, p: float, seed: int = 0, instance: Any = 0) -> NormExperimentReport:
    strong = norms.strong_norm(S, pair, p, seed=seed)
    dual_strong = norms.strong_norm(S, pair.swapped(), dual_exponent(p), seed=seed)
    weak = norms.weak_norm(S, pair, p, seed=seed)
    dual_weak = norms.dual_weak_norm(S, pair, p, seed=seed)
    forward, dual = norms.testing_constants(S, pair, p)
    row = {
        "instance": instance,
        "p": p,
        "size": len(S.grid.leaves()),
        "strong": strong.estimate,
        "dual_strong": dual_strong.estimate,
        "weak": weak,
        "dual_weak": dual_weak,
        "testing": forward,
        "dual_testing": dual,
        "ratio": _ratio(strong.estimate, weak + dual_weak),
    }
    report = NormExperimentReport(f"lsut:{instance}", [row])
    report.checks["testing_below_strong"] = forward <= strong.estimate * (1.0 + 1e-9)
    report.checks["dual_testing_below_strong"] = dual <= dual_strong.estimate * (1.0 + 1e-9)
    report.checks["weak_below_strong"] = weak <= strong.estimate * (1.0 + 1e-9)
    return report


def _lsut_task(instance: Instance) -> NormExperimentReport:
    _, S = instance_family(instance)
    return check_lsut(S, _pair_for(instance), instance.p, seed=instance.seed, instance=instance.seed)


def lsut_suite(
    count: int = 20,
    ps: Sequence[float] = (1.5, 2.0, 3.0),
    levels: Sequence[int] = (3, 4, 5),
    oscillation: float = 1.0,
    seed: int = 0,
    workers: int = 1,
) -> NormExperimentReport:
    report = _suite("lsut", _lsut_task, seeded_instances(count, ps, levels, oscillation, seed), workers)
    ratios = [r for r in report.ratios if math.isfinite(r) and r > 0.0]
    band = max(ratios) / min(ratios) if ratios else math.inf
    report.extras["band"] = band
    report.checks["band"] = band <= LSUT_BAND
    return report


# maximal domination and Calderón–Zygmund exactness


def check_maximal(f: AnyFunction, grid: DyadicGrid, lam: float, a: Optional[float] = None, instance: Any = 0) -> NormExperimentReport:
    """M^D f ≤ a·T^S f cell by cell, and the CZ decomposition of f at height λ."""
    report = NormExperimentReport(f"maximal:{instance}")
    try:
        domination = maximal_dominated_by_sparse(f, grid, a)
        decomposition = cz_decompose(f, grid, lam)
    except InvariantError as exc:
        report.checks["invariants"] = False
        report.notes.append(f"instance {instance}: {exc} {exc.witness}")
        return report
    g_max = float(np.max(np.abs(decomposition.g.values)))
    report.rows.append(
        {
            "instance": instance,
            "kind": grid.kind,
            "size": len(grid.leaves()),
            "a": domination.a,
            "sparse_cubes": len(domination.family),
            "max_violation": domination.max_violation,
            "lambda": lam,
            "cz_cubes": len(decomposition.cubes),
            "g_over_lambda": g_max / lam,
            "cz_constant": max(1.0, 1.0 / grid.epsilon),
            "ratio": g_max / lam,
        }
    )
    report.checks["invariants"] = True
    report.checks["domination"] = domination.holds
    return report


def _maximal_task(args: Tuple[int, int]) -> NormExperimentReport:
    seed, level = args
    rng = np.random.default_rng(seed)
    if seed % 3 == 2:
        space = random_plane_space(48, seed=seed, random_mass=True)
        grid = finite_grid(space, seed=seed)
        f: AnyFunction = random_point_function(rng, space)
    else:
        grid = line_grid(0.0, 0, level)
        f = random_step_function(rng, level)
    floor = average(abs(f), grid.extent)
    lam = floor * (1.0 + 3.0 * rng.random())
    return check_maximal(f, grid, lam, instance=seed)


def maximal_suite(count: int = 50, levels: Sequence[int] = (3, 4, 5), seed: int = 0, workers: int = 1) -> NormExperimentReport:
    items = [(seed + i, levels[i % len(levels)]) for i in range(count)]
    return _suite("maximal", _maximal_task, items, workers)


SUITES: Dict[str, Callable[..., NormExperimentReport]] = {
    "double": double_suite,
    "separated": separated_suite,
    "weak11": weak11_suite,
    "lemma61": lemma61_suite,
    "lsut": lsut_suite,
    "maximal": maximal_suite,
}
