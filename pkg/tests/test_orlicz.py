"""Tests for averages, Luxemburg norms and the Hölder inequalities."""

import math

import numpy as np
import pytest

from sht_bumps.core.orlicz import average, holder_product, lp_average, orlicz_norm, three_function_holder
from sht_bumps.core.stepfunctions import IntervalSet, StepFunction
from sht_bumps.core.young import LINEAR, LogBump, Power, PowerLog, complementary, inverse
from sht_bumps.errors import DegenerateSetError

UNIT = IntervalSet.of((0.0, 1.0))


def _random_step(rng: np.random.Generator, cells: int = 12) -> StepFunction:
    inner = np.sort(rng.uniform(0.0, 1.0, cells - 1))
    breakpoints = np.concatenate(([0.0], inner, [1.0]))
    return StepFunction(breakpoints, rng.uniform(0.0, 5.0, cells))


def test_exact_averages() -> None:
    assert average(StepFunction.indicator(0.0, 1.0), IntervalSet.of((0.0, 2.0))) == pytest.approx(0.5)
    assert average(StepFunction.indicator(0.0, 1.0, 3.0), UNIT) == pytest.approx(3.0)
    assert average(StepFunction.indicator(0.0, 0.125, 8.0), IntervalSet.of((0.0, 0.25))) == pytest.approx(4.0)


def test_average_over_null_set_is_rejected() -> None:
    with pytest.raises(DegenerateSetError):
        average(StepFunction.indicator(0.0, 1.0), IntervalSet(()))


def test_power_norm_matches_lp_oracle() -> None:
    rng = np.random.default_rng(2024)
    for _ in range(100):
        f = _random_step(rng)
        for p in (1.5, 2.0, 3.0):
            assert orlicz_norm(f, UNIT, Power(p)) == pytest.approx(lp_average(f, UNIT, p), rel=1e-9)


def test_norm_of_constant_and_zero() -> None:
    assert orlicz_norm(StepFunction.indicator(0.0, 1.0, 2.5), UNIT, Power(2.0)) == pytest.approx(2.5, rel=1e-10)
    assert orlicz_norm(StepFunction.indicator(0.0, 1.0, 0.0), UNIT, LogBump(2.0, 1.0)) == 0.0
    assert orlicz_norm(StepFunction.indicator(0.0, 1.0, 2.5), UNIT, LINEAR) == pytest.approx(2.5)


def test_norm_defining_property_and_homogeneity() -> None:
    rng = np.random.default_rng(5)
    A = LogBump(2.0, 1.0)
    for _ in range(10):
        f = _random_step(rng)
        lam = orlicz_norm(f, UNIT, A)
        values, weights = f.sample(UNIT)
        assert float(np.dot(A(np.abs(values) / lam), weights)) == pytest.approx(1.0, abs=1e-8)
        assert orlicz_norm(f * 3.0, UNIT, A) == pytest.approx(3.0 * lam, rel=1e-9)
        bigger = f + StepFunction.indicator(0.0, 1.0, 0.5)
        assert orlicz_norm(bigger, UNIT, A) >= lam - 1e-10


def test_single_block_weight_norm() -> None:
    K4 = 16.0 * math.log(math.e + 4.0) ** -3
    u0 = StepFunction.indicator(3.0, 4.0, K4)
    Phi = PowerLog(1.0, 2.0)
    norm = orlicz_norm(u0, IntervalSet.of((0.0, 4.0)), Phi)
    assert norm == pytest.approx(K4 / inverse(Phi, 4.0), rel=1e-9)
    heuristic = K4 * math.log(math.e + 4.0) ** 2 / 4.0
    assert 0.1 < norm / heuristic < 10.0


def test_holder_product_inequality() -> None:
    one = StepFunction.indicator(0.0, 1.0)
    lhs, rhs = holder_product(one, one, UNIT, Power(2.0))
    assert lhs == pytest.approx(1.0)
    assert rhs >= lhs

    rng = np.random.default_rng(11)
    zero = StepFunction.indicator(0.0, 1.0, 0.0)
    lhs, rhs = holder_product(_random_step(rng), zero, UNIT, Power(2.0))
    assert lhs == 0.0
    assert rhs == 0.0

    for A in (Power(3.0), LogBump(2.0, 1.0)):
        for _ in range(25):
            f, g = _random_step(rng), _random_step(rng)
            lhs, rhs = holder_product(f, g, UNIT, A)
            assert lhs <= rhs * (1.0 + 1e-9)


def test_complementary_norms_are_finite() -> None:
    rng = np.random.default_rng(3)
    f = _random_step(rng)
    assert 0.0 < orlicz_norm(f, UNIT, complementary(LogBump(2.0, 1.0))) < math.inf


def test_three_function_holder_with_powers() -> None:
    rng = np.random.default_rng(17)
    for _ in range(20):
        f, g = _random_step(rng), _random_step(rng)
        lhs, rhs = three_function_holder(f, g, UNIT, Power(2.0), Power(4.0), Power(4.0), 1.0)
        assert lhs <= rhs * (1.0 + 1e-9)


def test_norm_is_absolutely_homogeneous() -> None:
    rng = np.random.default_rng(31)
    families = (Power(1.5), Power(3.0), LogBump(2.0, 1.0), PowerLog(1.0, 2.0), LINEAR)
    for _ in range(20):
        f = _random_step(rng)
        c = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 20.0))
        for A in families:
            assert orlicz_norm(f * c, UNIT, A) == pytest.approx(abs(c) * orlicz_norm(f, UNIT, A), rel=1e-9)
