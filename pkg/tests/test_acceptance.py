"""
End-to-end reproduction checks. The full sweeps are marked slow.
"""

import pytest

from evaluation.battery import run_battery
from evaluation.reproduce import (
    check_approx_bin,
    check_grouping,
    check_optimal_rate,
    check_rate_bounds,
    check_trends,
    format_reproduction_report,
    grouping_instances,
    mn_instances,
)
from src.simulation.simulator import DemandMode


def test_small_mn_instances_reach_optimum():
    for scheme in mn_instances(max_k=4, max_n=3):
        report = run_battery(scheme, payload_bytes=8, show_progress=False)
        assert report.passed, f"{scheme.describe()}: {report.failed_checks}"
        assert report.gap == 0


def test_small_grouping_instances():
    for scheme in grouping_instances(max_n=4):
        if scheme.N ** scheme.K > 1000:
            mode = DemandMode.random(20)
        else:
            mode = DemandMode.exhaustive()
        report = run_battery(scheme, payload_bytes=8, mode=mode, show_progress=False)
        assert report.passed, f"{scheme.describe()}: {report.failed_checks}"


def test_rate_bounds_and_sandwich():
    bounds = check_rate_bounds(max_n=10)
    assert bounds.passed, bounds.detail
    sandwich = check_approx_bin()
    assert sandwich.passed, sandwich.detail


def test_report_format():
    outcome = check_rate_bounds(max_n=4)
    text = format_reproduction_report([outcome])
    assert text.splitlines()[1] == "REPRODUCTION REPORT"
    assert "Passed 1/1" in text


@pytest.mark.slow
def test_full_optimal_rate_sweep():
    outcome = check_optimal_rate()
    assert outcome.passed, outcome.detail


@pytest.mark.slow
def test_full_grouping_sweep():
    outcome = check_grouping()
    assert outcome.passed, outcome.detail


@pytest.mark.slow
def test_full_rate_bounds_and_trends():
    assert check_rate_bounds().passed
    trends = check_trends()
    assert trends.passed, trends.detail
