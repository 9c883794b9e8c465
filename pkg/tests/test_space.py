"""Tests for finite spaces, dyadic grids and the grid checker."""

import math

import numpy as np
import pytest

from sht_bumps.core.space import (
    DyadicGrid,
    FiniteSpace,
    circle_space,
    cover_count,
    dilate,
    finite_grid,
    finite_grid_family,
    line_grid,
    random_plane_space,
    shifted_line_grids,
    smallest_containing_cube,
    snowflake_space,
    space_balls,
    verify_grid,
)
from sht_bumps.core.stepfunctions import IntervalSet
from sht_bumps.errors import DomainError, InvariantError, ParameterError


def test_line_grid_passes_all_checks() -> None:
    grid = line_grid(0.0, 0, 6)
    report = verify_grid(grid)
    assert report.passed
    assert report.epsilon == pytest.approx(0.5)
    assert report.eta == 0.5
    assert report.outer_constant <= grid.C
    assert set(report.properties) == {"partition", "nested", "parents", "mass_ratio", "balls"}


def test_line_grid_nesting() -> None:
    grid = line_grid(0.0, 0, 4)
    quarter = grid.cubes[grid.locate(0.1, 2)]
    assert quarter.interval == (0.0, 0.25)
    assert [c.interval for c in grid.ancestors(quarter)] == [(0.0, 0.5), (0.0, 1.0)]
    for cube in grid.cubes:
        for child in cube.children:
            assert grid.cubes[child].measure == pytest.approx(cube.measure / 2.0)


def test_shifted_grids_are_valid_dyadic_systems() -> None:
    for grid in shifted_line_grids(0, 6):
        assert verify_grid(grid).passed, grid.shift


def test_two_shifts_cover_an_interval_at_comparable_scale() -> None:
    grids = [line_grid(0.0, 0, 8), line_grid(1.0 / 3.0, 0, 8)]
    found = smallest_containing_cube(grids, IntervalSet.of((0.3, 0.4)))
    assert found is not None
    _, cube = found
    assert cube.measure / 0.1 <= 4.0


def test_corrupted_grid_fails_with_witness() -> None:
    payload = line_grid(0.0, 0, 3).to_dict()
    finest = payload["generations"][-1]["cubes"]
    finest[0]["intervals"] = [[0.0, 0.2]]
    report = verify_grid(DyadicGrid.from_dict(payload))
    assert not report.passed
    assert not report.properties["partition"] or not report.properties["nested"]
    assert report.witnesses
    with pytest.raises(InvariantError):
        report.raise_if_failed()


def test_grid_round_trips_through_dict() -> None:
    grid = finite_grid(circle_space(32), seed=3)
    restored = DyadicGrid.from_dict(grid.to_dict())
    assert len(restored.cubes) == len(grid.cubes)
    assert restored.generations == grid.generations
    assert verify_grid(restored).passed


def test_single_point_space() -> None:
    space = FiniteSpace(np.zeros((1, 1)), np.array([2.0]))
    grid = finite_grid(space)
    for k in grid.generations:
        cubes = grid.generation(k)
        assert len(cubes) == 1
        assert cubes[0].members.indices == (0,)
    assert verify_grid(grid).passed


def test_two_point_space_splits_below_unit_scale() -> None:
    space = FiniteSpace(np.array([[0.0, 1.0], [1.0, 0.0]]), np.ones(2))
    grid = finite_grid(space)
    assert len(grid.top()) == 1
    assert grid.top()[0].members.indices == (0, 1)
    assert grid.scale(grid.k_max) < 1.0
    assert sorted(c.members.indices for c in grid.leaves()) == [(0,), (1,)]
    assert verify_grid(grid).passed


def test_circle_grid_passes() -> None:
    report = verify_grid(finite_grid(circle_space(128)))
    assert report.passed
    assert report.epsilon > 0.0


def test_random_plane_spaces_pass() -> None:
    for seed in range(5):
        space = random_plane_space(64, seed=seed, random_mass=True)
        report = verify_grid(finite_grid(space, seed=seed))
        assert report.passed, (seed, report.witnesses)


def test_snowflake_is_a_quasi_metric() -> None:
    space = snowflake_space(random_plane_space(24, seed=1), 2.0)
    assert space.K >= 1.0
    assert verify_grid(finite_grid(space)).passed


def test_finite_space_validation() -> None:
    with pytest.raises(DomainError):
        FiniteSpace(np.array([[0.0, 1.0], [2.0, 0.0]]), np.ones(2))
    with pytest.raises(DomainError):
        FiniteSpace(np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([1.0, 0.0]))
    with pytest.raises(ParameterError):
        finite_grid(circle_space(8), eta=0.5)


def test_dilate_is_monotone_ball_around_cube() -> None:
    grid = line_grid(0.0, 0, 3)
    top = grid.top()[0]
    ball = dilate(grid, top, 2.0)
    assert ball.bounds == (-1.5, 2.5)
    assert top.members.issubset(dilate(grid, top, 1.0))
    assert dilate(grid, top, 1.5).issubset(dilate(grid, top, 3.0))
    with pytest.raises(ParameterError):
        dilate(grid, top, 0.5)


def test_grid_family_covers_every_ball() -> None:
    space = random_plane_space(20, seed=4)
    grids, report = finite_grid_family(space)
    assert 1 <= len(grids) <= 16
    assert report.certified or report.uncovered
    loose = cover_count(grids, space_balls(space), math.inf)
    assert loose.certified
    assert loose.worst_ratio >= 1.0
