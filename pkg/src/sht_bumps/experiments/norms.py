"""Two-weight norms of sparse operators on a finite cell partition."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..core.bump import WeightPair, dual_exponent
from ..core.sparse import SparseFamily

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 10_000


@dataclass(frozen=True, eq=False)
class CellOperator:
    """T^S(·σ) acting on functions constant on cells.

    (T^S(fσ))_i = Σ_j M[i, j] f_j with M[i, j] = Σ_{Q∈S, Q∋i,j} σ_j ℓ_j / μ(Q).
    """

    lengths: np.ndarray
    u: np.ndarray
    sigma: np.ndarray
    incidence: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)
    p: float

    @property
    def n_cells(self) -> int:
        return int(self.lengths.size)

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ f

    def norm_u(self, y: np.ndarray) -> float:
        return float(np.dot(np.abs(y) ** self.p, self.u * self.lengths) ** (1.0 / self.p))

    def norm_sigma(self, f: np.ndarray) -> float:
        return float(np.dot(np.abs(f) ** self.p, self.sigma * self.lengths) ** (1.0 / self.p))

    def ratio(self, f: np.ndarray) -> float:
        bottom = self.norm_sigma(f)
        return self.norm_u(self.apply(f)) / bottom if bottom > 0.0 else 0.0

    def rescaled(self) -> np.ndarray:
        """D_{uℓ}^{1/p} M D_{σℓ}^{-1/p}, whose ℓ^p → ℓ^p norm is the two-weight norm."""
        left = (self.u * self.lengths) ** (1.0 / self.p)
        right = (self.sigma * self.lengths) ** (-1.0 / self.p)
        return left[:, None] * self.matrix * right[None, :]


def cell_operator(S: SparseFamily, pair: WeightPair, p: float) -> CellOperator:
    grid = S.grid
    cubes = S.members()
    if grid.kind == "finite":
        lengths = grid.space.mass.copy()
        u, sigma = pair.u.values.copy(), pair.sigma.values.copy()
        incidence = np.zeros((lengths.size, len(cubes)), dtype=bool)
        for column, cube in enumerate(cubes):
            incidence[cube.members.index_array, column] = True
    else:
        cuts = [grid.extent.endpoints(), pair.u.breakpoints, pair.sigma.breakpoints]
        cuts += [np.asarray(cube.interval) for cube in cubes]
        breakpoints = np.unique(np.concatenate(cuts))
        lefts, rights = breakpoints[:-1], breakpoints[1:]
        keep = grid.extent.contains(lefts)
        lefts, rights = lefts[keep], rights[keep]
        lengths = rights - lefts
        u, sigma = np.asarray(pair.u(lefts), dtype=float), np.asarray(pair.sigma(lefts), dtype=float)
        incidence = np.zeros((lengths.size, len(cubes)), dtype=bool)
        for column, cube in enumerate(cubes):
            lo, hi = cube.interval
            incidence[(lefts >= lo) & (lefts < hi), column] = True
    measures = np.array([cube.measure for cube in cubes], dtype=float)
    weights = incidence / measures[None, :] if cubes else incidence.astype(float)
    matrix = (weights @ incidence.T.astype(float)) * (sigma * lengths)[None, :]
    return CellOperator(lengths, u, sigma, incidence, matrix, float(p))


def _lp(x: np.ndarray, p: float) -> float:
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


def boyd_iteration(
    A: np.ndarray, p: float, max_iterations: int = MAX_ITERATIONS, tol: float = 1e-12
) -> Tuple[float, np.ndarray, int, bool]:
    """Nonlinear power iteration for ‖A‖_{p→p} of a nonnegative matrix.

    x ← ψ_{p'}(Aᵀ ψ_p(Ax)) normalized in ℓ^p, where ψ_r(y) = y^{r-1};
    ‖Ax‖_p increases monotonically along the iterates.
    """
    q = dual_exponent(p)
    x = np.ones(A.shape[1])
    x /= _lp(x, p)
    value = 0.0
    for iteration in range(1, max_iterations + 1):
        y = A @ x
        current = _lp(y, p)
        if current == 0.0:
            return 0.0, x, iteration, True
        z = A.T @ np.power(y, p - 1.0)
        if not np.any(z > 0.0):
            return current, x, iteration, True
        x = np.power(z, q - 1.0)
        x /= _lp(x, p)
        if abs(current - value) <= tol * current:
            return max(current, _lp(A @ x, p)), x, iteration, True
        value = current
    logger.warning("power iteration stopped after %d steps at %.12g", max_iterations, value)
    return max(value, _lp(A @ x, p)), x, max_iterations, False


def trial_functions(op: CellOperator, seed: int = 0, n_random: int = 32) -> List[np.ndarray]:
    """Cube indicators, the constant 1 and seeded random nonnegative cell functions."""
    rng = np.random.default_rng(seed)
    tests = [op.incidence[:, j].astype(float) for j in range(op.incidence.shape[1])]
    tests.append(np.ones(op.n_cells))
    tests.extend(rng.random(op.n_cells) ** 3 for _ in range(n_random))
    return tests


@dataclass(frozen=True, eq=False)
class StrongNormEstimate:
    estimate: float
    lower_bound: float
    gap: float
    iterations: int
    converged: bool
    maximizer: Optional[np.ndarray] = field(default=None, repr=False)


def strong_norm(S: SparseFamily, pair: WeightPair, p: float, seed: int = 0, n_random: int = 32) -> StrongNormEstimate:
    """‖T^S(·σ)‖_{L^p(σ)→L^p(u)} by power iteration, with a random-search lower bound."""
    op = cell_operator(S, pair, p)
    if len(S) == 0 or op.n_cells == 0:
        return StrongNormEstimate(0.0, 0.0, 0.0, 0, True, np.zeros(op.n_cells))
    value, x, iterations, converged = boyd_iteration(op.rescaled(), p)
    maximizer = x * (op.sigma * op.lengths) ** (-1.0 / p)
    lower = max(op.ratio(f) for f in trial_functions(op, seed, n_random))
    estimate = max(value, lower)
    gap = (estimate - lower) / estimate if estimate > 0.0 else 0.0
    logger.debug("strong norm %.10g (lower %.10g, %d iterations)", estimate, lower, iterations)
    return StrongNormEstimate(estimate, lower, gap, iterations, converged, maximizer)


def weak_ratio(op: CellOperator, f: np.ndarray) -> float:
    """sup_λ λ·u{T^S(fσ) > λ}^{1/p} / ‖f‖_{L^p(σ)}, with λ swept over the output levels."""
    bottom = op.norm_sigma(f)
    if bottom <= 0.0:
        return 0.0
    y = op.apply(f)
    order = np.argsort(-y, kind="stable")
    levels = y[order]
    mass = np.cumsum((op.u * op.lengths)[order])
    positive = levels > 0.0
    if not np.any(positive):
        return 0.0
    return float(np.max(levels[positive] * mass[positive] ** (1.0 / op.p)) / bottom)


def weak_norm(S: SparseFamily, pair: WeightPair, p: float, seed: int = 0, n_random: int = 32) -> float:
    """Weak-type norm over the strong-norm test set plus its maximizer, so it never exceeds that estimate."""
    op = cell_operator(S, pair, p)
    if len(S) == 0 or op.n_cells == 0:
        return 0.0
    tests = trial_functions(op, seed, n_random)
    maximizer = strong_norm(S, pair, p, seed, n_random).maximizer
    if maximizer is not None:
        tests.append(maximizer)
    return max(weak_ratio(op, f) for f in tests)


def dual_weak_norm(S: SparseFamily, pair: WeightPair, p: float, seed: int = 0, n_random: int = 32) -> float:
    """Weak norm of the adjoint T^S(·u): L^{p'}(u) → L^{p',∞}(σ)."""
    return weak_norm(S, pair.swapped(), dual_exponent(p), seed, n_random)


def _testing(op: CellOperator) -> float:
    best = 0.0
    for column in range(op.incidence.shape[1]):
        chi = op.incidence[:, column].astype(float)
        mass = float(np.dot(chi, op.sigma * op.lengths))
        if mass <= 0.0:
            continue
        best = max(best, op.norm_u(chi * op.apply(chi)) / mass ** (1.0 / op.p))
    return best


def testing_constants(S: SparseFamily, pair: WeightPair, p: float) -> Tuple[float, float]:
    """(sup_Q ‖χ_Q T^S(χ_Q σ)‖_{L^p(u)}/σ(Q)^{1/p}, the same with (u, p) and (σ, p') exchanged)."""
    if len(S) == 0:
        return 0.0, 0.0
    forward = _testing(cell_operator(S, pair, p))
    dual = _testing(cell_operator(S, pair.swapped(), dual_exponent(p)))
    return forward, dual
