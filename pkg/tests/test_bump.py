"""Tests for weight pairs, scan families and bump constants."""

import math

import numpy as np
import pytest

from sht_bumps.core.bump import (
    ScanFamily,
    WeightPair,
    ball_dyadic_equivalence,
    bump_double,
    bump_double_uv,
    bump_separated,
    bump_separated_dual,
    dual_exponent,
)
from sht_bumps.core.space import line_grid, shifted_line_grids
from sht_bumps.core.stepfunctions import StepFunction
from sht_bumps.core.young import LogBump, Power
from sht_bumps.errors import DomainError, ParameterError

ONE = StepFunction.indicator(0.0, 1.0)


def _random_weight(rng: np.random.Generator, shift: float = 0.0) -> StepFunction:
    breakpoints = np.linspace(0.0, 1.0, 9) + shift
    return StepFunction(breakpoints, rng.lognormal(0.0, 1.0, 8))


def test_dual_exponent() -> None:
    assert dual_exponent(2.0) == 2.0
    assert dual_exponent(3.0) == pytest.approx(1.5)
    with pytest.raises(DomainError):
        dual_exponent(1.0)


def test_weight_pair_floor_and_swap() -> None:
    pair = WeightPair(StepFunction.indicator(0.0, 0.5), StepFunction.indicator(0.5, 1.0))
    assert pair.window.bounds == (0.0, 1.0)
    assert float(pair.u(0.75)) == pytest.approx(pair.floor)
    swapped = pair.swapped()
    assert float(swapped.u(0.75)) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        WeightPair(ONE, ONE, floor=0.0)


def test_unit_weights_have_unit_bumps() -> None:
    pair = WeightPair(ONE, ONE)
    family = ScanFamily.from_pair(pair)
    assert bump_double(pair, Power(2.0), Power(2.0), 2.0, family).value == pytest.approx(1.0, rel=1e-9)
    assert bump_separated(pair, Power(2.0), 2.0, family).value == pytest.approx(1.0, rel=1e-9)
    assert bump_separated_dual(pair, Power(2.0), 2.0, family).value == pytest.approx(1.0, rel=1e-9)


def test_report_records_extremal_set() -> None:
    u = StepFunction(np.array([0.0, 0.5, 1.0]), np.array([1.0, 9.0]))
    pair = WeightPair(u, ONE)
    report = bump_separated(pair, Power(2.0), 2.0, ScanFamily.from_pair(pair))
    row = report.csv_row()
    assert row["kind"] == "separated-A"
    assert 0.5 <= row["extremal_lo"] < row["extremal_hi"] <= 1.0
    assert not report.diverges
    assert report.to_dict()["evaluated"] == report.evaluated


def test_double_bump_is_translation_invariant() -> None:
    rng = np.random.default_rng(12)
    u_values, s_values = rng.lognormal(size=8), rng.lognormal(size=8)
    A, B = LogBump(2.0, 1.0), LogBump(2.0, 1.0)
    values = []
    for shift in (0.0, 5.0):
        breakpoints = np.linspace(0.0, 1.0, 9) + shift
        pair = WeightPair(StepFunction(breakpoints, u_values), StepFunction(breakpoints, s_values))
        values.append(bump_double(pair, A, B, 2.0, ScanFamily.from_pair(pair)).value)
    assert values[0] == pytest.approx(values[1], rel=1e-9)


def test_double_bump_dominates_separated_bumps() -> None:
    rng = np.random.default_rng(3)
    A, B = LogBump(2.0, 1.0), LogBump(2.0, 1.0)
    for _ in range(5):
        pair = WeightPair(_random_weight(rng), _random_weight(rng))
        family = ScanFamily.from_pair(pair)
        double = bump_double(pair, A, B, 2.0, family).value
        assert bump_separated(pair, A, 2.0, family).value <= double * (1.0 + 1e-9)
        assert bump_separated_dual(pair, B, 2.0, family).value <= double * (1.0 + 1e-9)


def test_empty_scan_family_is_rejected() -> None:
    pair = WeightPair(ONE, ONE)
    with pytest.raises(DomainError):
        bump_double(pair, Power(2.0), Power(2.0), 2.0, ScanFamily("empty", (), ()))


def test_ball_and_dyadic_suprema_agree_for_unit_weights() -> None:
    pair = WeightPair(ONE, ONE)
    report = ball_dyadic_equivalence(pair, Power(2.0), 2.0, [line_grid(0.0, 0, 4)], ScanFamily.from_pair(pair))
    assert report.ball_over_dyadic == pytest.approx(1.0, rel=1e-9)
    assert report.dyadic_over_ball == pytest.approx(1.0, rel=1e-9)
    assert report.within_band


def test_ball_and_dyadic_suprema_stay_in_band() -> None:
    rng = np.random.default_rng(20)
    grids = shifted_line_grids(0, 5)
    for _ in range(20):
        pair = WeightPair(_random_weight(rng), _random_weight(rng))
        report = ball_dyadic_equivalence(pair, LogBump(2.0, 1.0), 2.0, grids, ScanFamily.from_pair(pair))
        assert math.isfinite(report.band)
        assert report.within_band, report.to_dict()
        assert report.extended_sup >= report.ball_sup
        assert report.dyadic_over_ball == pytest.approx(report.dyadic_sup / report.ball_sup)
        assert report.dyadic_over_extended == pytest.approx(report.dyadic_sup / report.extended_sup)
        assert report.dyadic_over_ball >= report.dyadic_over_extended


def test_uv_form_matches_double_bump() -> None:
    rng = np.random.default_rng(30)
    A, B = LogBump(3.0, 1.0), LogBump(1.5, 1.0)
    pair = WeightPair(_random_weight(rng), _random_weight(rng))
    v = pair.sigma.power(1.0 - 3.0)
    family = ScanFamily.from_grid(line_grid(0.0, 0, 3))
    double = bump_double(pair, A, B, 3.0, family)
    uv = bump_double_uv(pair.u, v, A, B, 3.0, family)
    assert uv.kind == "double-uv"
    assert uv.value == pytest.approx(double.value, rel=1e-9)
