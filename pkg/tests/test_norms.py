"""Tests for two-weight norms of sparse operators."""

import numpy as np
import pytest

from sht_bumps.core.bump import dual_exponent
from sht_bumps.core.space import line_grid
from sht_bumps.core.sparse import SparseFamily
from sht_bumps.experiments import norms
from sht_bumps.experiments.instances import Instance, constant_pair, instance_family, random_weight_pair


def _top_family() -> SparseFamily:
    grid = line_grid(0.0, 0, 3)
    return SparseFamily.from_cubes(grid, [grid.top()[0].id])


def test_averaging_operator_has_unit_norm() -> None:
    estimate = norms.strong_norm(_top_family(), constant_pair(), 2.0)
    assert estimate.estimate == pytest.approx(1.0, rel=1e-9)
    assert estimate.converged
    assert estimate.lower_bound <= estimate.estimate * (1.0 + 1e-12)


def test_empty_family_has_zero_norms() -> None:
    grid = line_grid(0.0, 0, 3)
    empty = SparseFamily(grid, (), {})
    pair = constant_pair()
    assert norms.strong_norm(empty, pair, 2.0).estimate == 0.0
    assert norms.weak_norm(empty, pair, 2.0) == 0.0
    assert norms.testing_constants(empty, pair, 2.0) == (0.0, 0.0)


def test_cell_operator_matches_sparse_averages() -> None:
    grid = line_grid(0.0, 0, 2)
    half = grid.cubes[grid.locate(0.0, 1)]
    family = SparseFamily.from_cubes(grid, [grid.top()[0].id, half.id])
    op = norms.cell_operator(family, constant_pair(), 2.0)
    assert np.allclose(op.lengths, [0.5, 0.5])
    assert np.allclose(op.apply(np.array([1.0, 0.0])), [1.5, 0.5])


def test_weak_and_testing_constants_are_below_strong_norm() -> None:
    rng = np.random.default_rng(6)
    for seed in range(6):
        instance = Instance(seed=seed, p=(1.5, 2.0, 3.0)[seed % 3], level=4)
        _, family = instance_family(instance)
        pair = random_weight_pair(rng, level=4)
        strong = norms.strong_norm(family, pair, instance.p).estimate
        weak = norms.weak_norm(family, pair, instance.p)
        forward, dual = norms.testing_constants(family, pair, instance.p)
        dual_strong = norms.strong_norm(family, pair.swapped(), dual_exponent(instance.p)).estimate
        assert weak <= strong * (1.0 + 1e-9)
        assert forward <= strong * (1.0 + 1e-6)
        assert dual <= dual_strong * (1.0 + 1e-6)
        assert norms.dual_weak_norm(family, pair, instance.p) <= dual_strong * (1.0 + 1e-9)
