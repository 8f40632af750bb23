"""
Tests for the verification battery and its report.
"""

from fractions import Fraction

from evaluation.battery import format_verification_report, run_battery
from src.schemes.grouping import GroupingScheme
from src.schemes.mn import MnScheme
from src.simulation.simulator import DemandMode


def _checks(report):
    return {check.name: check for check in report.checks}


def test_mn_battery_passes():
    report = run_battery(MnScheme(4, 4, 2), payload_bytes=16, seed=1, show_progress=False)
    assert report.passed
    assert report.optimal_rate == Fraction(2, 3)
    assert report.optimal_subpacketization == 6
    assert report.gap == 0
    assert report.sweep.demand_count == 4 ** 4
    checks = _checks(report)
    assert {"symmetry", "union_identity", "intersection_identity", "divisibility",
            "decode", "rate_lower_bound", "rate_optimal"} <= set(checks)
    assert checks["divisibility"].required
    assert not checks["feasible_regime"].required


def test_mn_battery_with_random_mode():
    mode = DemandMode.random(25, seed=3)
    report = run_battery(MnScheme(5, 3, 2, 2), payload_bytes=8, seed=3, mode=mode, show_progress=False)
    assert report.passed
    assert report.sweep.demand_count == 25


def test_grouping_battery_passes():
    report = run_battery(GroupingScheme(4, 1, 2), payload_bytes=16, show_progress=False)
    assert report.passed
    checks = _checks(report)
    assert checks["rate_nominal"].passed
    assert checks["ratio_paths"].passed
    assert not checks["divisibility"].required
    assert report.sweep.worst_rate == Fraction(2, 3)


def test_grouping_above_optimum_has_positive_gap():
    report = run_battery(GroupingScheme(5, 2, 1), payload_bytes=8, mode=DemandMode.random(10), show_progress=False)
    assert report.passed
    assert report.gap == Fraction(4, 5)


def test_report_text():
    report = run_battery(MnScheme(3, 3, 1), payload_bytes=8, show_progress=False)
    text = format_verification_report(report)
    lines = text.splitlines()
    assert lines[0] == "=" * 80
    assert lines[1] == "VERIFICATION REPORT: mn K=3 N=3 t=1 h=1"
    assert "R* = 1    F* = 3" in lines
    assert "[PASS] symmetry: Z=1 t=1" in lines
    assert "Result: all checks passed" in lines
    assert report.to_dict()["failed"] == []
