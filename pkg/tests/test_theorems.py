"""Tests for the seeded instance suites behind the two-weight inequalities."""

import math

import pytest

from sht_bumps.core.space import line_grid
from sht_bumps.core.stepfunctions import StepFunction
from sht_bumps.core.young import LogBump, Power, PowerLog
from sht_bumps.errors import ParameterError, PreconditionError
from sht_bumps.experiments import theorems
from sht_bumps.experiments.instances import Instance, instance_family


def test_log_bump_pair_uses_dual_exponent() -> None:
    A, B = theorems.log_bump_pair(3.0, 1.0)
    assert (A.p, A.delta) == (3.0, 1.0)
    assert B.p == pytest.approx(1.5)
    assert B.delta == 1.0


def test_conjugate_constants() -> None:
    A, B = theorems.log_bump_pair(2.0, 1.0)
    a_bar, b_bar = theorems.conjugate_constants(A, B, 2.0)
    assert 0.0 < a_bar < math.inf
    assert 0.0 < b_bar < math.inf
    with pytest.raises(PreconditionError):
        theorems.conjugate_constants(Power(2.0), Power(2.0), 2.0)


def test_double_suite_is_bounded() -> None:
    report = theorems.double_suite(count=3, ps=(2.0,), levels=(3,))
    assert len(report.rows) == 3
    assert report.checks["finite"]
    assert report.checks["duality_chain"]
    assert report.checks["maximal_bounded"]
    assert report.checks["uv_form_agrees"]
    assert report.extras["size_slope"] is None
    assert report.checks["size_trend"]
    assert [row["instance"] for row in report.rows] == [0, 1, 2]


def test_separated_suite_is_bounded() -> None:
    report = theorems.separated_suite(count=3, ps=(2.0,), levels=(3,))
    assert len(report.rows) == 3
    assert report.checks["finite"]
    assert report.checks["weak_below_strong"]
    assert report.extras["weak_slope"] is None
    assert report.extras["strong_slope"] is None
    assert report.checks["weak_trend"]
    assert report.checks["strong_trend"]
    for row in report.rows:
        assert row["bump_a"] > 0.0 and row["bump_b"] > 0.0
        assert row["ratio"] == pytest.approx(row["strong"] / (row["bump_a"] + row["bump_b"]))
        assert row["weak_ratio"] == pytest.approx(row["weak"] / row["bump_a"])


def test_separated_suite_tracks_trend_across_sizes() -> None:
    report = theorems.separated_suite(count=4, ps=(2.0,), levels=(3, 4))
    assert {row["size"] for row in report.rows} == {8, 16}
    assert report.extras["weak_slope"] is not None
    assert report.extras["strong_slope"] is not None
    assert report.checks["weak_trend"] == (report.extras["weak_slope"] <= theorems.TREND_LIMIT)


def test_separated_check_on_an_instance() -> None:
    instance = Instance(seed=4, p=3.0, level=3)
    _, family = instance_family(instance)
    A, B = theorems.log_bump_pair(3.0, 1.0)
    report = theorems.check_thm_separated(family, theorems._pair_for(instance), A, B, 3.0, seed=4, instance=4)
    row = report.rows[0]
    assert report.checks == {"finite": True, "weak_below_strong": True}
    assert row["testing"] <= row["strong"] * (1.0 + 1e-9)


def test_weak11_precondition() -> None:
    assert 0.0 < theorems.weak11_precondition(PowerLog(1.0, 2.0), 2.0) < math.inf


def test_weak11_suite_has_no_bad_part_leakage() -> None:
    report = theorems.weak11_suite(count=2, levels=(3,))
    assert report.rows
    assert report.checks["finite"]
    assert report.checks["bad_parts_vanish"]
    assert report.checks["uv_bump_at_most_one"]
    assert all(row["lambda"] > 0.0 for row in report.rows)


def test_lemma61_parameters() -> None:
    params = theorems.lemma61_parameters(2.0, 1.0)
    assert params["epsilon"] == pytest.approx(0.25)
    assert params["q"] == pytest.approx(1.125)
    assert params["eta"] == pytest.approx(0.5)
    assert params["C"].p == pytest.approx(2.0)
    with pytest.raises(ParameterError):
        theorems.lemma61_parameters(2.0, 1.0, epsilon=0.5)
    with pytest.raises(ParameterError):
        theorems.lemma61_parameters(2.0, 1.0, epsilon=0.0)


def test_lemma61_requires_matching_log_bump() -> None:
    instance = Instance(seed=0, level=3)
    pair = theorems._pair_for(instance)
    with pytest.raises(ParameterError):
        theorems.check_lemma61(pair, Power(2.0), 2.0)
    with pytest.raises(ParameterError):
        theorems.check_lemma61(pair, LogBump(3.0, 1.0), 2.0)


def test_lemma61_suite_is_bounded() -> None:
    report = theorems.lemma61_suite(count=2, ps=(2.0,), levels=(3,))
    assert report.checks["holder_bounded"]
    assert report.checks["c_in_bp"]
    assert report.checks["finite"]
    assert len(report.rows) == 6


def test_lsut_checks_hold_on_an_instance() -> None:
    instance = Instance(seed=4, p=2.0, level=3)
    _, family = instance_family(instance)
    report = theorems.check_lsut(family, theorems._pair_for(instance), 2.0, seed=4, instance=4)
    assert report.checks["testing_below_strong"]
    assert report.checks["dual_testing_below_strong"]
    assert report.checks["weak_below_strong"]
    assert report.rows[0]["strong"] >= report.rows[0]["weak"] * (1.0 - 1e-9)


def test_check_maximal_on_spike() -> None:
    grid = line_grid(0.0, 0, 6)
    report = theorems.check_maximal(StepFunction.indicator(0.0, 0.125, 8.0), grid, 2.0, instance="spike")
    assert report.checks == {"invariants": True, "domination": True}
    row = report.rows[0]
    assert row["cz_cubes"] == 1
    assert row["g_over_lambda"] <= row["cz_constant"]


def test_maximal_suite_mixes_line_and_finite_grids() -> None:
    report = theorems.maximal_suite(count=6, levels=(3, 4))
    assert report.checks["invariants"]
    assert report.checks["domination"]
    assert {row["kind"] for row in report.rows} == {"line", "finite"}
    assert all(row["g_over_lambda"] <= row["cz_constant"] * (1.0 + 1e-9) for row in report.rows)


def test_suite_registry() -> None:
    assert set(theorems.SUITES) == {"double", "separated", "weak11", "lemma61", "lsut", "maximal"}
