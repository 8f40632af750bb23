"""
Reproduction Runner

Runs the full reproduction suite end to end: optimal-rate and grouping-scheme
sweeps over real payloads, counting identities, divisibility, the R >= R*
bounds for small n, asymptotic trends and the binomial-approximation sandwich.
Writes a text report to evaluation/outputs/.
"""

import os
import sys
import time
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, List, Optional

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from loguru import logger

import config
from evaluation.asymptotics import approx_bin_check, ceil_log, geometric_range, identity, trend_table
from evaluation.battery import run_battery
from src.errors import ConsistencyError
from src.schemes.grouping import GroupingScheme, grouping_rate_vs_optimal, verify_lower1
from src.schemes.mn import MnScheme
from src.simulation.simulator import DemandMode


@dataclass
class CriterionOutcome:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def to_line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name} ({self.seconds:.1f}s): {self.detail}"


def _battery_failures(schemes, seed: int, random_count: Optional[int]) -> List[str]:
    failures = []
    for scheme in schemes:
        mode = DemandMode.auto(scheme.K, scheme.N, seed)
        if mode.kind == "random" and random_count is not None:
            mode = DemandMode.random(random_count, seed)
        report = run_battery(scheme, seed=seed, mode=mode)
        if not report.passed:
            failures.append(f"{scheme.name} {scheme.describe()}: {','.join(report.failed_checks)}")
    return failures


def mn_instances(max_k: int = 6, max_n: int = 6):
    for K in range(2, max_k + 1):
        for N in range(2, max_n + 1):
            for t in range(1, K + 1):
                for h in (1, 2):
                    yield MnScheme(K, N, t, h)


def grouping_instances(max_n: int = 7):
    for n in range(1, max_n + 1):
        for a in range(0, n + 1):
            for b in range(0, n - a + 1):
                yield GroupingScheme(n, a, b)


def check_optimal_rate(seed: int = 0, random_count: Optional[int] = None) -> CriterionOutcome:
    """mn sweeps: decode, identities, divisibility and worst rate == R*."""
    failures = _battery_failures(mn_instances(), seed, random_count)
    return CriterionOutcome(
        "mn optimal rate, identities, divisibility",
        not failures,
        "all instances pass" if not failures else "; ".join(failures[:5]),
    )


def check_grouping(seed: int = 0, random_count: Optional[int] = None) -> CriterionOutcome:
    """Grouping sweeps: decode, identities, count C(n,a+b) and nominal rate."""
    failures = _battery_failures(grouping_instances(), seed, random_count)
    return CriterionOutcome(
        "grouping decode, identities, nominal rate",
        not failures,
        "all instances pass" if not failures else "; ".join(failures[:5]),
    )


def check_rate_bounds(max_n: int = 12) -> CriterionOutcome:
    bad = []
    for n in range(1, max_n + 1):
        for a in range(0, n + 1):
            for b in range(0, n - a + 1):
                try:
                    grouping_rate_vs_optimal(n, a, b)
                except ConsistencyError:
                    bad.append(f"(n={n},a={a},b={b})")
                    continue
                if not verify_lower1(n, a, b):
                    bad.append(f"(n={n},a={a},b={b}) lower1")
    return CriterionOutcome(
        f"R >= R*, ratio paths, lower1 for n <= {max_n}",
        not bad,
        "exhaustive" if not bad else ", ".join(bad[:10]),
    )


def check_trends(epsilon: float = 1.0) -> CriterionOutcome:
    table = trend_table(epsilon, [10**3, 10**4, 10**5, 10**6])
    rows = table.rows
    ratios = [r.ratio_float for r in rows]
    slack = config.TREND_MONOTONE_SLACK
    ratio_ok = all(nxt <= prev + slack for prev, nxt in zip(ratios, ratios[1:])) and ratios[-1] <= 1.25
    exponent_ok = all(r.log_F <= (1 + epsilon) * r.log_K for r in rows if r.n >= 10**4)
    stats = [r.claim3_statistic for r in rows]
    stat_ok = all(nxt > prev for prev, nxt in zip(stats, stats[1:]))
    return CriterionOutcome(
        "asymptotic trends",
        ratio_ok and exponent_ok and stat_ok and table.passed,
        f"ratios={','.join(f'{r:.6g}' for r in ratios)} "
        f"claim3={','.join(f'{s:.4g}' for s in stats)} verdicts={'pass' if table.passed else 'fail'}",
    )


def check_approx_bin() -> CriterionOutcome:
    rows = approx_bin_check(ceil_log, identity, geometric_range(10, 10**6, 10))
    bad = [r.n for r in rows if not r.sandwich_holds]
    return CriterionOutcome(
        "binomial approximation sandwich",
        not bad,
        f"n up to 10^6, product at 10^6 = {rows[-1].product:.9f}" if not bad else f"failing n={bad}",
    )


def _timed(fn: Callable[[], CriterionOutcome]) -> CriterionOutcome:
    start = time.perf_counter()
    outcome = fn()
    outcome.seconds = time.perf_counter() - start
    logger.info(outcome.to_line())
    return outcome


def format_reproduction_report(outcomes: List[CriterionOutcome]) -> str:
    lines = ["=" * 80, "REPRODUCTION REPORT", "=" * 80, ""]
    lines += [o.to_line() for o in outcomes]
    lines += ["", f"Passed {sum(o.passed for o in outcomes)}/{len(outcomes)}", "=" * 80]
    return "\n".join(lines) + "\n"


def main() -> int:
    """Run every check and write the report; returns 0 iff all pass."""
    logger.info("Starting reproduction run...")
    outcomes = [
        _timed(check_optimal_rate),
        _timed(check_grouping),
        _timed(check_rate_bounds),
        _timed(check_trends),
        _timed(check_approx_bin),
    ]

    output_dir = Path(__file__).parent / "outputs"
    output_dir.mkdir(exist_ok=True)
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    output_path = output_dir / f"reproduction_report_{timestamp}.txt"
    output_path.write_text(format_reproduction_report(outcomes), encoding="utf-8")

    logger.info(f"Report saved to: {output_path}")
    return 0 if all(o.passed for o in outcomes) else 1


if __name__ == "__main__":
    sys.exit(main())
