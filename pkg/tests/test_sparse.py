"""Tests for stopping cubes, sparse families and the Calderón–Zygmund decomposition."""

from fractions import Fraction

import numpy as np
import pytest

from sht_bumps.core.sparse import (
    SparseFamily,
    bad_part_leakage,
    cz_cubes,
    cz_decompose,
    dyadic_maximal,
    l2_ratio,
    maximal_dominated_by_sparse,
    sparse_apply,
    sparse_from_levels,
    unresolved_cells,
)
from sht_bumps.core.space import finite_grid, line_grid, random_plane_space, resolving_generation
from sht_bumps.core.stepfunctions import IntervalSet, PointFunction, StepFunction
from sht_bumps.core.young import LINEAR, Power
from sht_bumps.errors import CoverageError, InvariantError, ParameterError, PreconditionError

SPIKE = StepFunction.indicator(0.0, 0.125, 8.0)


def _grid():
    return line_grid(0.0, 0, 6)


def _random_step(rng: np.random.Generator) -> StepFunction:
    cuts = np.sort(rng.choice(np.arange(1, 64), size=7, replace=False)) / 64.0
    breakpoints = np.concatenate(([0.0], cuts, [1.0]))
    return StepFunction(breakpoints, rng.exponential(1.0, breakpoints.size - 1) * (rng.random(breakpoints.size - 1) < 0.6))


def test_dyadic_maximal_of_spike() -> None:
    M = dyadic_maximal(SPIKE, _grid())
    assert float(M(0.05)) == pytest.approx(8.0)
    assert float(M(0.2)) == pytest.approx(4.0)
    assert float(M(0.3)) == pytest.approx(2.0)
    assert float(M(0.7)) == pytest.approx(1.0)


def test_maximal_of_constant_with_power_norm() -> None:
    f = StepFunction.indicator(0.0, 1.0, 3.0)
    M = dyadic_maximal(f, _grid(), Power(2.0))
    assert np.allclose(M.values, 3.0)


def test_maximal_dominates_function() -> None:
    rng = np.random.default_rng(8)
    grid = _grid()
    for _ in range(10):
        f = _random_step(rng)
        M = dyadic_maximal(f, grid)
        xs = np.linspace(0.0, 1.0, 257)[:-1]
        assert np.all(M(xs) >= f(xs) - 1e-12)


def test_cz_cubes_of_spike() -> None:
    grid = _grid()
    cubes = cz_cubes(SPIKE, grid, LINEAR, 2.0)
    assert [c.interval for c in cubes] == [(0.0, 0.25)]
    assert cz_cubes(SPIKE, grid, LINEAR, 8.0) == []
    superlevel = dyadic_maximal(SPIKE, grid).superlevel(2.0)
    assert superlevel.intervals == ((0.0, 0.25),)


def test_cz_cubes_preconditions() -> None:
    grid = _grid()
    with pytest.raises(PreconditionError):
        cz_cubes(SPIKE, grid, LINEAR, 0.5)
    with pytest.raises(ParameterError):
        cz_cubes(SPIKE, grid, LINEAR, 0.0)
    with pytest.raises(CoverageError):
        cz_cubes(StepFunction.indicator(0.5, 1.5), grid, LINEAR, 2.0)


def test_sparse_family_of_spike() -> None:
    family = sparse_from_levels(SPIKE, _grid(), LINEAR, 4.0)
    intervals = {c.interval for c in family.members()}
    assert intervals == {(0.0, 0.5), (0.0, 0.125)}
    assert sorted(family.levels.values()) == [0, 1]
    witnesses = [family.witness[i] for i in family.cubes]
    assert witnesses[0].intersection(witnesses[1]).measure == 0.0


def test_sparse_family_of_zero_is_empty() -> None:
    zero = StepFunction.indicator(0.0, 1.0, 0.0)
    assert len(sparse_from_levels(zero, _grid(), LINEAR)) == 0


def test_sparse_level_base_must_cover_mass_ratio() -> None:
    with pytest.raises(ParameterError):
        sparse_from_levels(SPIKE, _grid(), LINEAR, 3.0)


def test_random_families_are_sparse() -> None:
    rng = np.random.default_rng(21)
    grid = _grid()
    for _ in range(20):
        family = sparse_from_levels(_random_step(rng), grid, LINEAR)
        family.check()
        for cube in family.members():
            assert cube.measure <= 2.0 * family.witness[cube.id].measure * (1.0 + 1e-12)


def test_overlapping_witnesses_are_rejected() -> None:
    grid = _grid()
    top = grid.top()[0]
    half = grid.cubes[grid.locate(0.0, 1)]
    with pytest.raises(InvariantError):
        SparseFamily(grid, (top.id, half.id), {top.id: top.members, half.id: half.members})


def test_cz_decomposition_of_spike() -> None:
    decomposition = cz_decompose(SPIKE, _grid(), 2.0)
    assert len(decomposition.cubes) == 1
    assert decomposition.averages == (pytest.approx(2.0),)
    g = decomposition.g
    assert float(g(0.05)) == pytest.approx(2.0)
    assert float(g(0.2)) == pytest.approx(2.0)
    assert float(g(0.6)) == 0.0
    b = decomposition.b
    assert b.integral(IntervalSet.of((0.0, 0.25))) == pytest.approx(0.0, abs=1e-12)
    xs = np.linspace(0.0, 1.0, 129)[:-1]
    assert np.allclose(g(xs) + b(xs), SPIKE(xs))


def test_bad_part_is_a_signed_step_function() -> None:
    b = cz_decompose(SPIKE, _grid(), 2.0).b
    assert float(b(0.05)) == pytest.approx(6.0)
    assert float(b(0.2)) == pytest.approx(-2.0)
    assert np.all(abs(b).values >= 0.0)
    assert b.power(2.0).integral() == pytest.approx(36.0 / 8.0 + 4.0 / 8.0)
    assert list(b.jumps()) == pytest.approx([0.0, 0.125, 0.25])


def test_cz_decomposition_below_level_is_trivial() -> None:
    one = StepFunction.indicator(0.0, 1.0)
    decomposition = cz_decompose(one, _grid(), 2.0)
    assert decomposition.cubes == ()
    assert np.allclose(decomposition.g.values, 1.0)
    assert decomposition.b.is_zero()


def test_cz_decomposition_on_finite_grid() -> None:
    space = random_plane_space(40, seed=2, random_mass=True)
    grid = finite_grid(space)
    rng = np.random.default_rng(2)
    f = PointFunction(rng.exponential(1.0, 40) ** 3, space.mass)
    lam = 2.0 * f.integral() / space.total_mass
    decomposition = cz_decompose(f, grid, lam)
    assert np.max(np.abs(decomposition.g.values)) <= lam / grid.epsilon * (1.0 + 1e-9)


def test_sparse_apply_examples() -> None:
    grid = _grid()
    top = grid.top()[0]
    half = grid.cubes[grid.locate(0.0, 1)]
    one = StepFunction.indicator(0.0, 1.0)

    single = SparseFamily.from_cubes(grid, [top.id])
    assert float(sparse_apply(single, one)(0.5)) == pytest.approx(1.0)

    pair = SparseFamily.from_cubes(grid, [top.id, half.id])
    out = sparse_apply(pair, StepFunction.indicator(0.0, 0.5))
    assert float(out(0.25)) == pytest.approx(1.5)
    assert float(out(0.75)) == pytest.approx(0.5)
    assert 0.0 < l2_ratio(pair, one)


def test_sparse_apply_is_linear_and_positive() -> None:
    rng = np.random.default_rng(4)
    grid = _grid()
    family = sparse_from_levels(_random_step(rng), grid, LINEAR)
    f, g = _random_step(rng), _random_step(rng)
    xs = np.linspace(0.0, 1.0, 129)[:-1]
    combined = sparse_apply(family, f + g)(xs)
    separate = sparse_apply(family, f)(xs) + sparse_apply(family, g)(xs)
    assert np.allclose(combined, separate, rtol=1e-12, atol=1e-12)
    assert np.all(sparse_apply(family, f)(xs) >= 0.0)


def test_maximal_function_is_dominated_by_sparse_operator() -> None:
    grid = _grid()
    assert maximal_dominated_by_sparse(SPIKE, grid, 4.0).holds
    zero = StepFunction.indicator(0.0, 1.0, 0.0)
    check = maximal_dominated_by_sparse(zero, grid)
    assert check.holds
    assert check.max_violation == 0.0

    rng = np.random.default_rng(50)
    for _ in range(50):
        assert maximal_dominated_by_sparse(_random_step(rng), grid).holds


def test_bad_parts_do_not_leak() -> None:
    rng = np.random.default_rng(9)
    grid = _grid()
    for _ in range(10):
        f = _random_step(rng)
        family = sparse_from_levels(f, grid, LINEAR)
        level = f.integral(grid.extent) / grid.extent.measure
        stopping = cz_cubes(f, grid, LINEAR, max(2.0 * level, 1e-9))
        assert bad_part_leakage(f, family, stopping) == Fraction(0)


def test_maximal_dominates_function_off_unresolved_cells() -> None:
    f = StepFunction(np.array([0.0, 0.3, 0.71, 1.0]), np.array([2.0, 7.0, 1.0]))
    xs = np.linspace(0.0, 1.0, 4097)[:-1]
    for k in (4, 6, 8):
        grid = line_grid(0.0, 0, k)
        loose = unresolved_cells(f, grid)
        assert len(loose) == 2
        assert sum(cell.measure for cell in loose) == pytest.approx(2.0 * 2.0 ** -k)
        inside = np.zeros(xs.shape, dtype=bool)
        for cell in loose:
            lo, hi = cell.interval
            inside |= (xs >= lo) & (xs < hi)
        M = dyadic_maximal(f, grid)
        assert np.all(M(xs)[~inside] >= f(xs)[~inside] - 1e-12)


def test_cz_decomposition_rejects_grid_that_misses_a_spike() -> None:
    spike = StepFunction(np.array([0.0, 0.001, 1.0]), np.array([10.0, 0.0]))
    grid = line_grid(0.0, 0, 6, window=IntervalSet.of((0.0, 1.0)))
    loose = unresolved_cells(spike, grid)
    assert [cell.interval for cell in loose] == [(0.0, 0.015625)]
    with pytest.raises(CoverageError):
        cz_decompose(spike, grid, 3.0)
    assert resolving_generation(spike.jumps()) is None


def test_cz_decomposition_of_narrow_spike_on_resolving_grid() -> None:
    spike = StepFunction(np.array([0.0, 2.0 ** -9, 1.0]), np.array([10.0, 0.0]))
    with pytest.raises(CoverageError):
        cz_decompose(spike, _grid(), 3.0)
    depth = resolving_generation(spike.jumps())
    assert depth == 9
    grid = line_grid(0.0, 0, depth)
    assert unresolved_cells(spike, grid) == []
    decomposition = cz_decompose(spike, grid, 3.0)
    assert [grid.cubes[i].interval for i in decomposition.cubes] == [(0.0, 2.0 ** -8)]
    assert decomposition.averages == (pytest.approx(5.0),)
    assert np.max(np.abs(decomposition.g.values)) <= 3.0 / grid.epsilon
