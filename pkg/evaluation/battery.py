"""
Verification battery for one scheme instance

Runs the structural checks (symmetry, both counting identities, divisibility)
and a demand sweep against the closed-form optimum, and formats the outcome
as a text report.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from loguru import logger

import config
from src.errors import ConsistencyError
from src.schemes.grouping import GroupingScheme, grouping_rate_vs_optimal
from src.schemes.mn import MnScheme
from src.schemes.model import (
    CachingScheme,
    congruence_moduli,
    divisibility_check,
    feasible_regime,
    intersection_count_identity,
    optimal_rate,
    optimal_subpacketization,
    union_count_identity,
    validate_symmetric,
)
from src.simulation.simulator import DemandMode, SweepResult, format_rational, sweep_demands
from src.simulation.store import pack, random_files


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    required: bool = True

    def to_line(self) -> str:
        if self.required:
            mark = "PASS" if self.passed else "FAIL"
        else:
            mark = "INFO"
        return f"[{mark}] {self.name}: {self.detail}"


@dataclass
class VerificationReport:
    scheme: str
    params: str
    optimal_rate: Fraction
    optimal_subpacketization: int
    checks: List[CheckResult] = field(default_factory=list)
    sweep: Optional[SweepResult] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    @property
    def failed_checks(self) -> List[str]:
        return [c.name for c in self.checks if c.required and not c.passed]

    @property
    def gap(self) -> Optional[Fraction]:
        """Worst measured rate minus R*."""
        if self.sweep is None:
            return None
        return self.sweep.worst_rate - self.optimal_rate

    def to_dict(self) -> Dict:
        return {
            "scheme": self.scheme,
            "params": self.params,
            "optimal_rate": str(self.optimal_rate),
            "optimal_subpacketization": self.optimal_subpacketization,
            "worst_rate": None if self.sweep is None else str(self.sweep.worst_rate),
            "gap": None if self.gap is None else str(self.gap),
            "passed": self.passed,
            "failed": self.failed_checks,
        }


def run_battery(
    scheme: CachingScheme,
    payload_bytes: Optional[int] = None,
    seed: Optional[int] = None,
    mode: Optional[DemandMode] = None,
    show_progress: Optional[bool] = None,
) -> VerificationReport:
    params = scheme.params
    payload_bytes = config.DEFAULT_PAYLOAD_BYTES if payload_bytes is None else payload_bytes
    seed = config.DEFAULT_SEED if seed is None else seed
    report = VerificationReport(
        scheme=scheme.name,
        params=scheme.describe(),
        optimal_rate=optimal_rate(params),
        optimal_subpacketization=optimal_subpacketization(params),
    )
    checks = report.checks

    # ---- 1. Symmetry ----
    validation = validate_symmetric(params, scheme.placement)
    detail = f"Z={params.Z} t={params.t}"
    if not validation.valid:
        detail += f" violations={len(validation.violations)} first: {validation.violations[0].to_line()}"
    checks.append(CheckResult("symmetry", validation.valid, detail))

    # ---- 2. Counting identities ----
    union = [union_count_identity(scheme.placement, k) for k in range(1, params.K + 1)]
    bad = [c.k for c in union if not c.holds]
    checks.append(CheckResult(
        "union_identity",
        not bad,
        f"k=1..{params.K} method={union[0].method}" + (f" failing k={bad}" if bad else ""),
    ))
    inter = [intersection_count_identity(scheme.placement, k) for k in range(1, params.t + 1)]
    bad = [c.k for c in inter if not c.holds]
    checks.append(CheckResult(
        "intersection_identity",
        not bad,
        (f"k=1..{params.t}" if inter else "t=0, nothing to check") + (f" failing k={bad}" if bad else ""),
    ))

    # ---- 3. Divisibility ----
    divisible = divisibility_check(params)
    checks.append(CheckResult(
        "divisibility",
        divisible,
        f"F={params.F} F*={report.optimal_subpacketization} F mod F* = {params.F % report.optimal_subpacketization}",
        required=isinstance(scheme, MnScheme),
    ))
    checks.append(CheckResult(
        "feasible_regime",
        feasible_regime(params.K, params.N, params.t),
        f"t={params.t} <= min(K,N)={min(params.K, params.N)}",
        required=False,
    ))
    congruences = congruence_moduli(params.K, params.t, params.N)
    if congruences.applies:
        moduli = ",".join(f"k{k}:{m}" for k, m in congruences.moduli)
        checks.append(CheckResult(
            "congruences",
            congruences.satisfied_by(params.F),
            f"moduli {moduli} lcm={congruences.lcm}",
            required=False,
        ))

    # ---- 4. Demand sweep ----
    mode = mode or DemandMode.auto(params.K, params.N, seed)
    store = pack(random_files(params.N, payload_bytes, seed), params.F)
    sweep = sweep_demands(scheme, store, mode, show_progress=show_progress)
    report.sweep = sweep
    checks.append(CheckResult(
        "decode",
        sweep.all_verified,
        f"{sweep.demand_count} demands ({mode.describe()})"
        + ("" if sweep.all_verified else f" first failure: {sweep.first_failure.to_record()}"),
    ))
    checks.append(CheckResult(
        "rate_lower_bound",
        sweep.worst_rate >= report.optimal_rate,
        f"worst={format_rational(sweep.worst_rate)} R*={format_rational(report.optimal_rate)} "
        f"gap={format_rational(report.gap)}",
    ))

    if isinstance(scheme, MnScheme):
        checks.append(CheckResult(
            "rate_optimal",
            sweep.worst_rate == report.optimal_rate,
            f"worst={format_rational(sweep.worst_rate)} at demand {sweep.worst_demand.render()}",
        ))
    elif isinstance(scheme, GroupingScheme):
        g = scheme.grouping
        nominal = g.nominal_rate
        rates = {row.rate for row in sweep.rows}
        checks.append(CheckResult(
            "rate_nominal",
            rates == {nominal},
            f"every demand at C(n,a+b)/C(n,b)={format_rational(nominal)}",
        ))
        try:
            comparison = grouping_rate_vs_optimal(g.n, g.a, g.b, params.N)
        except ConsistencyError as exc:
            checks.append(CheckResult("ratio_paths", False, str(exc)))
        else:
            checks.append(CheckResult(
                "ratio_paths",
                True,
                f"R/R0={format_rational(comparison.ratio_closed)} R0={format_rational(comparison.R0)}",
            ))

    logger.info(
        f"battery {scheme.name} {scheme.describe()}: "
        f"{'pass' if report.passed else 'FAIL ' + ','.join(report.failed_checks)}"
    )
    return report


def format_verification_report(report: VerificationReport) -> str:
    """Human-readable report, one line per check."""
    lines = []
    lines.append("=" * 80)
    lines.append(f"VERIFICATION REPORT: {report.scheme} {report.params}")
    lines.append("=" * 80)
    lines.append("")
    lines.append(f"R* = {format_rational(report.optimal_rate)}    F* = {report.optimal_subpacketization}")
    if report.sweep is not None:
        lines.append(
            f"Worst measured rate = {format_rational(report.sweep.worst_rate)} "
            f"at demand {report.sweep.worst_demand.render()}"
        )
        lines.append(f"Gap R - R* = {format_rational(report.gap)}")
    lines.append("")
    for check in report.checks:
        lines.append(check.to_line())
    lines.append("")
    lines.append(f"Result: {'all checks passed' if report.passed else 'FAILED ' + ', '.join(report.failed_checks)}")
    lines.append("=" * 80)
    return "\n".join(lines) + "\n"
