"""Young functions: evaluation, inversion, complementary functions and B_p constants.

Every family is evaluated both directly and in logarithmic coordinates
(``log_eval(y) = log A(e^y)``), which keeps tail quadrature and the
complementary function finite far beyond the float range of ``A`` itself.
"""

from __future__ import annotations

import json
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, Optional, Tuple

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicSpline
from scipy.special import expit

from ..errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

_MAX_DOUBLINGS = 1000
_EPS = float(np.finfo(float).eps)
_TAIL_TOLERANCE = 1e-8
_MAX_TRUNCATION = 1e12
# log-coordinates tabulated for vectorized complementary functions
_TABLE_RANGE = (-40.0, 80.0)
_TABLE_STEP = 0.05


@dataclass(frozen=True)
class Growth:
    """Tail type A(t) ≍ t^power · log(e+t)^log_power for t ≥ 1."""

    power: float
    log_power: float


class YoungFunction(ABC):
    """Closed parametric universe of Young functions."""

    family: str = ""

    @abstractmethod
    def __call__(self, t: Any) -> Any:
        """Vectorized evaluation for t ≥ 0."""

    @abstractmethod
    def log_eval(self, y: Any) -> Any:
        """Return log A(e^y)."""

    @abstractmethod
    def elasticity(self, y: Any) -> Any:
        """Return d log A(e^y) / dy, i.e. t·A'(t)/A(t) at t = e^y."""

    @abstractmethod
    def derivative(self, t: Any) -> Any:
        ...

    @property
    @abstractmethod
    def growth(self) -> Growth:
        ...

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...

    def describe(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _log_e_plus(y: Any) -> Any:
    # log(e + e^y), stable for large |y|
    return np.logaddexp(1.0, y)


class _PowerLogBase(YoungFunction):
    """Shared machinery for t^p · log(e+t)^gamma."""

    @property
    @abstractmethod
    def exponents(self) -> Tuple[float, float]:
        ...

    def __call__(self, t: Any) -> Any:
        p, gamma = self.exponents
        t = np.asarray(t, dtype=float)
        return np.power(t, p) * np.power(np.log(np.e + t), gamma)

    def log_eval(self, y: Any) -> Any:
        p, gamma = self.exponents
        y = np.asarray(y, dtype=float)
        return p * y + gamma * np.log(_log_e_plus(y))

    def elasticity(self, y: Any) -> Any:
        p, gamma = self.exponents
        y = np.asarray(y, dtype=float)
        return p + gamma * expit(y - 1.0) / _log_e_plus(y)

    def derivative(self, t: Any) -> Any:
        p, gamma = self.exponents
        t = np.asarray(t, dtype=float)
        log_term = np.log(np.e + t)
        return p * np.power(t, p - 1.0) * np.power(log_term, gamma) + gamma * np.power(t, p) * np.power(
            log_term, gamma - 1.0
        ) / (np.e + t)

    @property
    def growth(self) -> Growth:
        p, gamma = self.exponents
        return Growth(p, gamma)


@dataclass(frozen=True)
class Power(YoungFunction):
    p: float
    family = "power"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and self.p > 1.0):
            raise DomainError(f"Power(p) requires p > 1, got {self.p}")

    def __call__(self, t: Any) -> Any:
        return np.power(np.asarray(t, dtype=float), self.p)

    def log_eval(self, y: Any) -> Any:
        return self.p * np.asarray(y, dtype=float)

    def elasticity(self, y: Any) -> Any:
        return np.full_like(np.asarray(y, dtype=float), self.p)

    def derivative(self, t: Any) -> Any:
        return self.p * np.power(np.asarray(t, dtype=float), self.p - 1.0)

    @property
    def growth(self) -> Growth:
        return Growth(self.p, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "p": self.p}


@dataclass(frozen=True)
class ScaledPower(YoungFunction):
    """c·t^p with p ≥ 1; p = 1 is the limiting linear case used for Φ(t) = t."""

    p: float
    c: float = 1.0
    family = "scaledpower"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and self.p >= 1.0):
            raise DomainError(f"ScaledPower requires p >= 1, got {self.p}")
        if not (math.isfinite(self.c) and self.c > 0.0):
            raise DomainError(f"ScaledPower requires c > 0, got {self.c}")

    def __call__(self, t: Any) -> Any:
        return self.c * np.power(np.asarray(t, dtype=float), self.p)

    def log_eval(self, y: Any) -> Any:
        return math.log(self.c) + self.p * np.asarray(y, dtype=float)

    def elasticity(self, y: Any) -> Any:
        return np.full_like(np.asarray(y, dtype=float), self.p)

    def derivative(self, t: Any) -> Any:
        return self.c * self.p * np.power(np.asarray(t, dtype=float), self.p - 1.0)

    @property
    def growth(self) -> Growth:
        return Growth(self.p, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "p": self.p, "c": self.c}


@dataclass(frozen=True)
class PowerLog(_PowerLogBase):
    """t^p · log(e+t)^gamma; gamma may be negative when p > 1."""

    p: float
    gamma: float
    family = "powerlog"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and self.p >= 1.0 and math.isfinite(self.gamma)):
            raise DomainError(f"PowerLog requires p >= 1 and finite gamma, got ({self.p}, {self.gamma})")
        if self.p == 1.0 and self.gamma <= 0.0:
            raise DomainError("PowerLog with p = 1 needs gamma > 0 to be superlinear")

    @property
    def exponents(self) -> Tuple[float, float]:
        return self.p, self.gamma

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "p": self.p, "gamma": self.gamma}


@dataclass(frozen=True)
class LogBump(_PowerLogBase):
    """The log bump t^p · log(e+t)^(p-1+delta)."""

    p: float
    delta: float
    family = "logbump"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and self.p > 1.0):
            raise DomainError(f"LogBump requires p > 1, got {self.p}")
        if not (math.isfinite(self.delta) and self.delta > 0.0):
            raise DomainError(f"LogBump requires delta > 0, got {self.delta}")

    @property
    def exponents(self) -> Tuple[float, float]:
        return self.p, self.p - 1.0 + self.delta

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "p": self.p, "delta": self.delta}


@dataclass(frozen=True)
class Product(YoungFunction):
    left: YoungFunction
    right: YoungFunction
    family = "product"

    def __call__(self, t: Any) -> Any:
        return self.left(t) * self.right(t)

    def log_eval(self, y: Any) -> Any:
        return self.left.log_eval(y) + self.right.log_eval(y)

    def elasticity(self, y: Any) -> Any:
        return self.left.elasticity(y) + self.right.elasticity(y)

    def derivative(self, t: Any) -> Any:
        return self.left.derivative(t) * self.right(t) + self.left(t) * self.right.derivative(t)

    @property
    def growth(self) -> Growth:
        lg, rg = self.left.growth, self.right.growth
        return Growth(lg.power + rg.power, lg.log_power + rg.log_power)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "left": self.left.to_dict(), "right": self.right.to_dict()}


@dataclass(frozen=True)
class Dilated(YoungFunction):
    """Φ(t^q), the function A_Φ of the weak-type estimate."""

    base: YoungFunction
    q: float
    family = "dilated"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.q) and self.q >= 1.0):
            raise DomainError(f"Dilated requires q >= 1, got {self.q}")

    def __call__(self, t: Any) -> Any:
        return self.base(np.power(np.asarray(t, dtype=float), self.q))

    def log_eval(self, y: Any) -> Any:
        return self.base.log_eval(self.q * np.asarray(y, dtype=float))

    def elasticity(self, y: Any) -> Any:
        return self.q * self.base.elasticity(self.q * np.asarray(y, dtype=float))

    def derivative(self, t: Any) -> Any:
        t = np.asarray(t, dtype=float)
        return self.base.derivative(np.power(t, self.q)) * self.q * np.power(t, self.q - 1.0)

    @property
    def growth(self) -> Growth:
        g = self.base.growth
        return Growth(self.q * g.power, g.log_power)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "base": self.base.to_dict(), "q": self.q}


@dataclass(frozen=True)
class Conjugate(YoungFunction):
    """The complementary function Ā(t) = sup_s (st - A(s)), computed in log coordinates.

    At the maximizer s* = e^{y*} we have A'(s*) = t, and
    Ā(t) = t·s*·(1 - 1/el(y*)) with el the elasticity of A.
    """

    base: YoungFunction
    family = "conjugate"

    def __post_init__(self) -> None:
        g = self.base.growth
        if g.power <= 1.0 and g.log_power <= 0.0:
            raise DomainError("a linear function has no finite complementary function")

    def _stationary(self, x: float) -> Optional[float]:
        """Solve log A'(e^y) = x; None when Ā vanishes at e^x."""
        base = self.base

        def gap(y: float) -> float:
            return float(base.log_eval(y) + np.log(base.elasticity(y)) - y) - x

        g = base.growth
        seed = x / (g.power - 1.0) if g.power > 1.0 else 0.0
        hi, step, count = seed, 1.0, 0
        while gap(hi) < 0.0:
            hi += step
            step *= 2.0
            count += 1
            if count > _MAX_DOUBLINGS:
                raise ConvergenceError(f"stationary bracket for {self.describe()} did not close at x={x}")
        lo, step, count = hi, 1.0, 0
        while gap(lo) > 0.0:
            lo -= step
            step *= 2.0
            count += 1
            if lo < -1e4:
                # A'(0+) >= t: the supremum sits at s = 0
                return None
            if count > _MAX_DOUBLINGS:
                raise ConvergenceError(f"stationary bracket for {self.describe()} did not close at x={x}")
        if lo == hi:
            return lo
        return optimize.brentq(gap, lo, hi, xtol=1e-14, maxiter=500)

    def log_eval_exact(self, x: float) -> float:
        y_star = self._stationary(x)
        if y_star is None:
            return -math.inf
        el = float(self.base.elasticity(y_star))
        if el <= 1.0:
            raise DomainError(f"{self.base.describe()} is not superlinear near e^{y_star}")
        return x + y_star + math.log1p(-1.0 / el)

    def _table(self) -> Optional[CubicSpline]:
        return _conjugate_table(self.base)

    def log_eval(self, y: Any) -> Any:
        y = np.asarray(y, dtype=float)
        flat = y.reshape(-1)
        out = np.empty_like(flat)
        spline = self._table()
        lo, hi = _TABLE_RANGE
        inside = (flat >= lo) & (flat <= hi) if spline is not None else np.zeros(flat.shape, dtype=bool)
        if np.any(inside):
            out[inside] = spline(flat[inside])
        for idx in np.flatnonzero(~inside):
            out[idx] = self.log_eval_exact(float(flat[idx]))
        return out.reshape(y.shape)

    def elasticity(self, y: Any) -> Any:
        y = np.asarray(y, dtype=float)
        flat = y.reshape(-1)
        out = np.empty_like(flat)
        spline = self._table()
        lo, hi = _TABLE_RANGE
        inside = (flat >= lo) & (flat <= hi) if spline is not None else np.zeros(flat.shape, dtype=bool)
        if np.any(inside):
            out[inside] = spline(flat[inside], 1)
        for idx in np.flatnonzero(~inside):
            y_star = self._stationary(float(flat[idx]))
            if y_star is None:
                out[idx] = 0.0
                continue
            el = float(self.base.elasticity(y_star))
            out[idx] = el / (el - 1.0)
        return out.reshape(y.shape)

    def __call__(self, t: Any) -> Any:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        positive = t > 0.0
        if np.any(positive):
            with np.errstate(over="ignore"):
                out[positive] = np.exp(self.log_eval(np.log(t[positive])))
        return out

    def derivative(self, t: Any) -> Any:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        positive = t > 0.0
        if np.any(positive):
            tp = t[positive]
            out[positive] = self(tp) * self.elasticity(np.log(tp)) / tp
        return out

    @property
    def growth(self) -> Growth:
        g = self.base.growth
        if g.power <= 1.0:
            return Growth(math.inf, 0.0)
        return Growth(g.power / (g.power - 1.0), -g.log_power / (g.power - 1.0))

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "base": self.base.to_dict()}


@lru_cache(maxsize=64)
def _conjugate_table(base: YoungFunction) -> Optional[CubicSpline]:
    """Spline of log Ā over a fixed log-window; None when Ā vanishes near 0."""
    conj = Conjugate(base)
    grid = np.arange(_TABLE_RANGE[0], _TABLE_RANGE[1] + _TABLE_STEP / 2, _TABLE_STEP)
    values = np.array([conj.log_eval_exact(float(x)) for x in grid])
    if not np.all(np.isfinite(values)):
        return None
    logger.debug("tabulated complementary function of %s on %d nodes", base.describe(), grid.size)
    return CubicSpline(grid, values)


def complementary(A: YoungFunction) -> YoungFunction:
    """Ā as a Young function; the complement of a complement is the original."""
    if isinstance(A, Conjugate):
        return A.base
    if isinstance(A, (Power, ScaledPower)) and A.p > 1.0:
        c = getattr(A, "c", 1.0)
        p = A.p
        return ScaledPower(p / (p - 1.0), (1.0 - 1.0 / p) * (c * p) ** (-1.0 / (p - 1.0)))
    return Conjugate(A)


LINEAR = ScaledPower(1.0, 1.0)


def is_linear(A: YoungFunction) -> bool:
    return isinstance(A, ScaledPower) and A.p == 1.0


def _check_argument(t: float, name: str = "t") -> float:
    try:
        value = float(t)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {t!r}") from exc
    if not math.isfinite(value) or value < 0.0:
        raise DomainError(f"{name} must be finite and nonnegative, got {t!r}")
    return value


def evaluate(A: YoungFunction, t: float) -> float:
    return float(A(_check_argument(t)))


def inverse(A: YoungFunction, y: float) -> float:
    """Return t with A(t) = y by bracketing and bisection."""
    y = _check_argument(y, "y")
    if y == 0.0:
        return 0.0

    def value(t: float) -> float:
        return float(A(t))

    power = A.growth.power
    seed = y ** (1.0 / power) if math.isfinite(power) and power > 0 else 1.0
    hi = max(seed, 1e-300)
    count = 0
    while value(hi) < y:
        hi *= 2.0
        count += 1
        if count > _MAX_DOUBLINGS:
            raise ConvergenceError(f"inverse bracket for {A.describe()} exceeded {_MAX_DOUBLINGS} doublings")
    lo = hi
    while value(lo) > y:
        hi = lo
        lo /= 2.0
        count += 1
        if count > 2 * _MAX_DOUBLINGS:
            raise ConvergenceError(f"inverse bracket for {A.describe()} exceeded {_MAX_DOUBLINGS} halvings")
    if value(lo) == y:
        return lo
    if value(hi) == y:
        return hi
    return float(optimize.bisect(lambda t: value(t) - y, lo, hi, xtol=1e-300, rtol=4 * _EPS, maxiter=2000))


def conjugate(A: YoungFunction, t: float, method: str = "stationary") -> float:
    """Evaluate the complementary function Ā(t).

    ``method="stationary"`` solves A'(s) = t in log coordinates;
    ``method="golden"`` maximizes s ↦ st - A(s) by golden-section search on the
    bracket (s*/2, s*, 2s*) built from the same stationarity condition.
    """
    t = _check_argument(t)
    if t == 0.0:
        return 0.0
    if isinstance(A, Power):
        p = A.p
        return t * (1.0 - 1.0 / p) * (t / p) ** (1.0 / (p - 1.0))
    conj = Conjugate(A)
    x = math.log(t)
    if method == "stationary":
        return math.exp(conj.log_eval_exact(x))
    if method != "golden":
        raise DomainError(f"unknown conjugation method {method!r}")

    y_star = conj._stationary(x)
    if y_star is None:
        return 0.0
    s_star = math.exp(y_star)

    def negative_gap(s: float) -> float:
        return -(s * t - float(A(s)))

    bracket = (s_star / 2.0, s_star, 2.0 * s_star)
    best = -negative_gap(s_star)
    if negative_gap(bracket[1]) < min(negative_gap(bracket[0]), negative_gap(bracket[2])):
        result = optimize.minimize_scalar(negative_gap, bracket=bracket, method="golden", tol=1e-12)
        best = max(best, -float(result.fun))
    return best


@dataclass(frozen=True)
class BpReport:
    p: float
    value: float
    diverges: bool
    truncation_point: float
    quadrature_error_bound: float

    @property
    def finite(self) -> bool:
        return not self.diverges

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "value": self.value,
            "diverges": self.diverges,
            "truncation_point": self.truncation_point,
            "quadrature_error_bound": self.quadrature_error_bound,
        }


def _tail_factor(x: float, kappa: float, log_power: float) -> float:
    """∫_x^∞ (s/x)^b e^{-κ(s-x)} ds, bounded with log(s/x) ≤ (s-x)/x."""
    if kappa <= 0.0:
        return x / (-log_power - 1.0)
    if log_power <= 0.0:
        return 1.0 / kappa
    rate = kappa - log_power / x
    return 1.0 / rate if rate > 0.0 else math.inf


def bp_constant(A: YoungFunction, p: float) -> BpReport:
    """[A]_{B_p} = ∫_1^∞ A(t) t^{-p} dt/t, integrated as ∫_0^∞ A(e^x) e^{-px} dx."""
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p > 1.0):
        raise DomainError(f"B_p requires p > 1, got {p!r}")
    g = A.growth
    at_edge = math.isclose(g.power, p, rel_tol=1e-12)
    if g.power > p and not at_edge or (at_edge and g.log_power >= -1.0):
        logger.info("B_%s diverges for %s (growth %s)", p, A.describe(), g)
        return BpReport(p, math.inf, True, math.inf, math.inf)

    kappa = 0.0 if at_edge else p - g.power

    def integrand(x: float) -> float:
        return math.exp(float(A.log_eval(x)) - p * x)

    value, error, lo, hi = 0.0, 0.0, 0.0, 1.0
    while True:
        part, abserr = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)
        value += part
        error += abserr
        tail = integrand(hi) * _tail_factor(hi, kappa, g.log_power)
        if tail <= _TAIL_TOLERANCE * value:
            error += tail
            break
        if hi >= _MAX_TRUNCATION:
            # model continuation past the cap; its mismatch against the
            # integrand at the cap bounds the error of the added tail
            predicted = integrand(hi / 2.0) * 2.0 ** g.log_power * math.exp(-kappa * hi / 2.0)
            actual = integrand(hi)
            mismatch = abs(actual / predicted - 1.0) if predicted > 0.0 else 1.0
            value += tail
            error += tail * mismatch
            break
        lo, hi = hi, 2.0 * hi
    logger.debug("B_%s of %s = %.12g (truncated at %g, error %.3g)", p, A.describe(), value, hi, error)
    return BpReport(p, value, False, hi, error)


def _check_grid(t_grid: Iterable[float]) -> np.ndarray:
    grid = np.asarray(list(t_grid), dtype=float)
    if grid.size == 0 or np.any(~np.isfinite(grid)) or np.any(grid < 1.0):
        raise DomainError("t_grid must be a nonempty list of finite reals >= 1")
    return grid


def holder_compatible(A: YoungFunction, B: YoungFunction, C: YoungFunction, t_grid: Iterable[float]) -> float:
    """max over the grid of B^{-1}(t)·C^{-1}(t) / A^{-1}(t)."""
    grid = _check_grid(t_grid)
    ratios = [inverse(B, t) * inverse(C, t) / inverse(A, t) for t in grid]
    return float(max(ratios))


def dominates(A: YoungFunction, B: YoungFunction, t_grid: Iterable[float]) -> float:
    """Smallest c with A(t) ≤ B(ct) on the grid (the constant of A ≲ B)."""
    grid = _check_grid(t_grid)
    return float(max(inverse(B, float(A(t))) / t for t in grid))


def equivalence_band(A: YoungFunction, B: YoungFunction, t_grid: Iterable[float]) -> Tuple[float, float]:
    """(min, max) of B(t)/A(t) over the grid."""
    grid = _check_grid(t_grid)
    ratios = np.asarray(B(grid), dtype=float) / np.asarray(A(grid), dtype=float)
    return float(ratios.min()), float(ratios.max())


def young_diagnostics(A: YoungFunction, t_grid: Optional[Iterable[float]] = None) -> Dict[str, Any]:
    grid = np.asarray(list(t_grid), dtype=float) if t_grid is not None else np.logspace(-3, 3, 61)
    values = np.asarray(A(grid), dtype=float)
    s, t = np.meshgrid(grid, grid)
    mid = np.asarray(A((s + t) / 2.0), dtype=float)
    chord = (np.asarray(A(s), dtype=float) + np.asarray(A(t), dtype=float)) / 2.0
    tolerance = 1e-12 * np.maximum(1.0, chord)
    tail = np.logspace(2, 12, 11)
    tail_ratio = np.asarray(A(tail), dtype=float) / tail
    return {
        "zero_at_origin": float(A(0.0)) == 0.0,
        "increasing": bool(np.all(np.diff(values) > 0.0)),
        "convex": bool(np.all(mid <= chord + tolerance)),
        "superlinear": bool(np.all(np.diff(tail_ratio) > 0.0)),
    }


_FAMILIES: Dict[str, Callable[[Dict[str, Any]], YoungFunction]] = {
    "power": lambda d: Power(float(d["p"])),
    "scaledpower": lambda d: ScaledPower(float(d["p"]), float(d.get("c", 1.0))),
    "powerlog": lambda d: PowerLog(float(d["p"]), float(d["gamma"])),
    "logbump": lambda d: LogBump(float(d["p"]), float(d["delta"])),
    "product": lambda d: Product(young_from_dict(d["left"]), young_from_dict(d["right"])),
    "dilated": lambda d: Dilated(young_from_dict(d["base"]), float(d["q"])),
    "conjugate": lambda d: Conjugate(young_from_dict(d["base"])),
}


def young_from_dict(data: Dict[str, Any]) -> YoungFunction:
    if not isinstance(data, dict):
        raise DomainError(f"Young function spec must be an object, got {data!r}")
    family = str(data.get("family", "")).lower()
    builder = _FAMILIES.get(family)
    if builder is None:
        raise DomainError(f"unknown Young function family {family!r}")
    try:
        return builder(data)
    except KeyError as exc:
        raise DomainError(f"Young function {family!r} is missing field {exc}") from exc
