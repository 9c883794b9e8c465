"""Tests for the discretized Hilbert transform."""

import math

import numpy as np
import pytest

from sht_bumps.core.stepfunctions import StepFunction
from sht_bumps.errors import DomainError, ParameterError
from sht_bumps.experiments.hilbert import (
    closed_form_interval,
    hilbert_apply,
    hilbert_point,
    hilbert_sanity,
    hilbert_suite,
    symmetry_defect,
    weighted_lp,
    weighted_weak_lp,
)

BOX = StepFunction.indicator(-1.0, 1.0)


def test_pointwise_values_of_an_indicator() -> None:
    values = hilbert_point(BOX, [0.0, 2.0, -3.0])
    assert values[0] == pytest.approx(0.0, abs=1e-15)
    assert values[1] == pytest.approx(math.log(3.0) / math.pi)
    assert values[2] == pytest.approx(float(closed_form_interval(-3.0)))
    assert np.isnan(hilbert_point(BOX, 1.0)[0])


def test_sanity_report_passes() -> None:
    report = hilbert_sanity()
    assert report.checks == {"closed_form": True, "antisymmetry": True}
    assert report.rows[0]["closed_form_defect"] <= 1e-6


def test_default_grid_and_collar() -> None:
    result = hilbert_apply(BOX)
    assert result.cell_width == 0.5
    assert result.values.domain.bounds == (-2.0, 2.0)
    assert result.collar.intervals == ((-1.5, -0.5), (0.5, 1.5))
    assert result.valid.measure == pytest.approx(2.0)
    lefts, rights, _ = result.valid_cells()
    assert np.all(~result.collar.contains(0.5 * (lefts + rights)))


def test_transform_commutes_with_translation() -> None:
    rng = np.random.default_rng(1)
    f = StepFunction(np.linspace(0.0, 1.0, 9), rng.normal(size=8))
    base = hilbert_apply(f, cell_width=1.0 / 32.0, center=0.5, window=(-1.0, 2.0))
    moved = hilbert_apply(f.translated(3.0), cell_width=1.0 / 32.0, center=3.5, window=(2.0, 5.0))
    assert np.allclose(base.values.values, moved.values.values, rtol=0.0, atol=1e-10)


def test_odd_function_has_even_transform() -> None:
    odd = StepFunction(np.array([-1.0, 0.0, 1.0]), np.array([-1.0, 1.0]))
    result = hilbert_apply(odd, cell_width=1.0 / 16.0, center=0.0, window=(-2.0, 2.0))
    assert symmetry_defect(result, 0.0, parity=1) <= 1e-10
    assert symmetry_defect(result, 0.0, parity=-1) > 0.1


def test_asymmetric_grid_is_rejected() -> None:
    result = hilbert_apply(BOX, cell_width=0.5, window=(-2.0, 3.0))
    with pytest.raises(DomainError):
        symmetry_defect(result, 0.0)


def test_input_validation() -> None:
    with pytest.raises(DomainError):
        hilbert_apply(StepFunction.zero())
    with pytest.raises(ParameterError):
        hilbert_apply(BOX, cell_width=-1.0)


def test_weighted_norm_scales_with_weight() -> None:
    result = hilbert_apply(BOX, cell_width=0.125, window=(-3.0, 3.0))
    unit = weighted_lp(result, StepFunction.indicator(-3.0, 3.0), 2.0)
    quadruple = weighted_lp(result, StepFunction.indicator(-3.0, 3.0, 4.0), 2.0)
    assert unit > 0.0
    assert quadruple == pytest.approx(2.0 * unit)


def test_small_suite_is_finite() -> None:
    report = hilbert_suite(count=2, ps=(2.0,), levels=(3,))
    assert report.checks["closed_form"]
    assert report.checks["antisymmetry"]
    assert report.checks["finite"]
    assert len(report.rows) == 3


def test_weak_norm_is_below_strong_norm() -> None:
    result = hilbert_apply(BOX, cell_width=0.125, window=(-3.0, 3.0))
    u = StepFunction.indicator(-3.0, 3.0)
    weak = weighted_weak_lp(result, u, 2.0)
    assert 0.0 < weak <= weighted_lp(result, u, 2.0) * (1.0 + 1e-12)
    assert weighted_weak_lp(result, StepFunction.indicator(-3.0, 3.0, 4.0), 2.0) == pytest.approx(2.0 * weak)


def test_suite_measures_separated_bumps() -> None:
    report = hilbert_suite(count=2, ps=(2.0, 3.0), levels=(3,))
    assert report.checks["separated_finite"]
    assert report.checks["weak_below_strong"]
    pairs = [row for row in report.rows if row["instance"] != "indicator"]
    assert len(pairs) == 2
    for row in pairs:
        assert row["bump_a"] > 0.0 and row["bump_b"] > 0.0
        assert 0.0 < row["separated_weak_ratio"] < math.inf
        assert 0.0 < row["separated_strong_ratio"] < math.inf
        assert row["weak"] <= row["lhs"] * (1.0 + 1e-9)
