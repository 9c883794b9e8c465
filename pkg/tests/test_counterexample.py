"""Tests for the block counterexample separating double from separated bumps."""

import math

import pytest

from sht_bumps.core.orlicz import orlicz_norm
from sht_bumps.core.stepfunctions import IntervalSet
from sht_bumps.core.young import PowerLog
from sht_bumps.errors import ParameterError
from sht_bumps.experiments.counterexample import (
    Counterexample7,
    LongInterval,
    block_samples,
    classify_regime,
    counterexample_build,
    counterexample_scan,
    separated_samples,
)


def test_block_constants_and_layout() -> None:
    ce = counterexample_build(30)
    assert ce.K(2) == pytest.approx(4.0 * math.log(math.e + 2.0) ** -3)
    block = ce.block(7)
    assert block.u_interval == (6.0, 7.0)
    assert block.sigma_interval == (0.0, 1.0)
    row = ce.block_row(7)
    assert row["separation"] == 5.0
    assert all(ce.block_row(n)["gap_ok"] for n in range(2, 31))


def test_build_rejects_bad_parameters() -> None:
    with pytest.raises(ParameterError):
        counterexample_build(1)
    with pytest.raises(ParameterError):
        Counterexample7(10, log_power=0.0)
    with pytest.raises(ParameterError):
        counterexample_build(10).block(11)
    with pytest.raises(ParameterError):
        counterexample_build(40).global_pair(35)


def test_block_samples_are_dense_then_geometric() -> None:
    assert block_samples(10) == list(range(2, 11))
    samples = block_samples(10_000)
    assert samples[:31] == list(range(2, 33))
    assert samples[-1] == 10_000
    assert samples == sorted(set(samples))
    assert separated_samples(100)[-1] == 100


def test_regime_classification() -> None:
    assert classify_regime([], 3.0) == "disjoint"
    assert classify_regime([9], 3.0) == "disjoint"
    assert classify_regime([4], 3.0) == "within-block"
    assert classify_regime([3, 4], 30.0) == "long"


def test_long_interval_blocks() -> None:
    interval = LongInterval(3, 5, "J", "I")
    assert interval.u_blocks() == [3, 4, 5]
    assert interval.sigma_blocks() == [3, 4, 5]
    assert LongInterval(3, 5, "I", "J").u_blocks() == [3, 4]
    assert LongInterval(3, 5, "I", "J").sigma_blocks() == [4, 5]
    assert interval.length() == pytest.approx(math.exp(5) + 5.0 - math.exp(3))


def test_single_block_norm_matches_global_layout() -> None:
    ce = counterexample_build(12)
    u, sigma = ce.global_pair()
    block = ce.block(6)
    phi = PowerLog(1.0, 2.0)
    local = orlicz_norm(block.u_local(), block.window, phi)
    offset = math.exp(6)
    glob = orlicz_norm(u, IntervalSet.of((offset, offset + 6.0)), phi)
    assert glob == pytest.approx(local, rel=1e-9)
    assert orlicz_norm(sigma, IntervalSet.of((offset, offset + 6.0)), phi) > 0.0


def test_double_scan_stays_in_log_band() -> None:
    series = counterexample_scan(counterexample_build(30), "double")
    report = series.report
    assert report.checks["band"]
    assert report.checks["global_cross_check"]
    assert "divergence" not in report.checks
    assert report.notes
    assert [n for n, _ in series.series] == list(range(2, 31))
    assert report.extras["band"] <= 10.0


def test_double_scan_diverges_at_scale() -> None:
    ce = counterexample_build(1_000_000)
    series = counterexample_scan(ce, "double", samples=[4, 1_000, 10_000, 100_000, 1_000_000])
    report = series.report
    assert report.checks["divergence"]
    assert report.extras["growth_over_n4"] >= 2.0
    assert series.values[-1] > series.values[0]


def test_separated_scan_plateaus() -> None:
    series = counterexample_scan(counterexample_build(100), "separated")
    checks = series.report.checks
    assert checks["plateau_A"]
    assert checks["plateau_B"]
    assert checks["disjoint_regime_zero"]
    assert checks["block_sup_decreasing"]
    rows = series.report.rows
    assert rows[-1]["block_sup_A"] < rows[0]["block_sup_A"]


def test_unknown_scan_mode() -> None:
    with pytest.raises(ParameterError):
        counterexample_scan(counterexample_build(10), "triple")


def test_second_variant_uses_squared_log() -> None:
    ce = counterexample_build(20, log_power=2.0)
    assert ce.K(5) == pytest.approx(25.0 * math.log(math.e + 5.0) ** -2)
    assert ce.to_dict()["log_power"] == 2.0
    assert ce.K(5) > counterexample_build(20).K(5)


def test_separated_samples_reach_n_max() -> None:
    samples = separated_samples(1000)
    assert samples[-1] == 1000
    assert 100 in samples
    assert samples[:9] == list(range(2, 11))
    assert separated_samples(7) == list(range(2, 8))


def test_separated_scan_covers_top_block() -> None:
    series = counterexample_scan(counterexample_build(1000), "separated")
    report = series.report
    assert series.series[-1][0] == 1000
    assert report.rows[-1]["block_sup_A"] > 0.0
    assert report.checks["plateau_A"]
    assert report.checks["plateau_B"]
    assert report.extras["sup_A_from_100"] <= 1.2 * max(row["running_sup_A"] for row in report.rows if row["n"] <= 10)
    assert report.extras["long_regime_limit"] == 200
    assert any("long intervals" in note for note in report.notes)


def test_short_separated_scan_skips_plateau() -> None:
    report = counterexample_scan(counterexample_build(30), "separated").report
    assert "plateau_A" not in report.checks
    assert report.notes
