"""Luxemburg norms over finite-measure sets and the generalized Hölder inequalities."""

from __future__ import annotations

import logging
import math
from typing import Tuple

import numpy as np
from scipy import optimize

from ..errors import ConvergenceError, DegenerateSetError, DomainError
from .stepfunctions import AnyFunction, Region
from .young import ScaledPower, YoungFunction, complementary

logger = logging.getLogger(__name__)

_MAX_STEPS = 2000
_RTOL = 1e-13


def _sample(f: AnyFunction, E: Region) -> Tuple[np.ndarray, np.ndarray, float]:
    measure = E.measure
    if not measure > 0.0:
        raise DegenerateSetError("the averaging set has measure zero")
    if not math.isfinite(measure):
        raise DomainError("the averaging set must have finite measure")
    values, weights = f.sample(E)
    if not np.all(np.isfinite(values)):
        raise DomainError("function values must be finite")
    return np.abs(values), weights, measure


def average(f: AnyFunction, E: Region) -> float:
    """⨍_E f dμ as an exact finite sum."""
    values, weights = f.sample(E)
    measure = E.measure
    if not measure > 0.0:
        raise DegenerateSetError("the averaging set has measure zero")
    return float(np.dot(values, weights) / measure)


def lp_average(f: AnyFunction, E: Region, p: float) -> float:
    """(⨍_E |f|^p dμ)^{1/p}; the closed form of the Power(p) norm."""
    values, weights, measure = _sample(f, E)
    return float((np.dot(np.power(values, p), weights) / measure) ** (1.0 / p))


def orlicz_norm(f: AnyFunction, E: Region, A: YoungFunction) -> float:
    """inf{λ > 0 : ⨍_E A(|f|/λ) dμ ≤ 1}.

    Linear A has the exact value c·⨍|f|; every other family is solved by
    bisection on λ from a geometric bracket seeded at max |f|.
    """
    values, weights, measure = _sample(f, E)
    positive = (values > 0.0) & (weights > 0.0)
    if not np.any(positive):
        return 0.0
    values, weights = values[positive], weights[positive] / measure

    if isinstance(A, ScaledPower) and A.p == 1.0:
        return float(A.c * np.dot(values, weights))

    def excess(lam: float) -> float:
        with np.errstate(over="ignore"):
            return float(np.dot(np.asarray(A(values / lam), dtype=float), weights)) - 1.0

    hi = float(values.max())
    steps = 0
    while excess(hi) > 0.0:
        hi *= 2.0
        steps += 1
        if steps > _MAX_STEPS:
            raise ConvergenceError("orlicz norm bracket did not close from above")
    lo = hi
    while excess(lo) <= 0.0:
        hi = lo
        lo /= 2.0
        steps += 1
        if steps > _MAX_STEPS:
            raise ConvergenceError("orlicz norm bracket did not close from below")
    if excess(hi) == 0.0:
        return hi
    lam = optimize.bisect(excess, lo, hi, xtol=1e-300, rtol=_RTOL, maxiter=500)
    logger.debug("orlicz norm %.15g after %d bracket steps", lam, steps)
    return float(lam)


def holder_product(f: AnyFunction, g: AnyFunction, E: Region, A: YoungFunction) -> Tuple[float, float]:
    """(⨍_E |fg|, 2‖f‖_{A,E}‖g‖_{Ā,E})."""
    lhs = average(abs(f * g), E)
    rhs = 2.0 * orlicz_norm(f, E, A) * orlicz_norm(g, E, complementary(A))
    return lhs, rhs


def three_function_holder(
    f: AnyFunction,
    g: AnyFunction,
    E: Region,
    A: YoungFunction,
    B: YoungFunction,
    C: YoungFunction,
    K: float,
) -> Tuple[float, float]:
    """(‖fg‖_{A,E}, 2K‖f‖_{B,E}‖g‖_{C,E}) for B^{-1}C^{-1} ≤ K·A^{-1}."""
    if not (math.isfinite(K) and K > 0.0):
        raise DomainError(f"compatibility constant must be positive, got {K}")
    lhs = orlicz_norm(f * g, E, A)
    rhs = 2.0 * K * orlicz_norm(f, E, B) * orlicz_norm(g, E, C)
    return lhs, rhs
