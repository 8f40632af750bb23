"""
Asymptotic parameter engine for the grouping scheme

Picks (c, a, b) from epsilon as
    c = ceil(1 + 1/eps),  a = ceil((ln n)^c),  b = n - a - c
then evaluates, per n, the log sizes of K, F and F* = C(K, C(n-b, a)), the
rate ratio R/R0 and the two statistics whose finite-n trends stand in for the
limits. Logs are natural logs throughout.

Provides:
- params_from_epsilon / evaluate_row: one row of the table
- trend_table: rows plus trend verdicts over the tail half of the rows
- approx_bin_check: the C(g,f) * f! / g^f sandwich
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

import numpy as np
from loguru import logger

import config
from src.errors import DomainError, GuardrailError, InsufficientRangeError
from src.schemes.grouping import grouping_rate_vs_optimal
from src.schemes.model import optimal_rate_for, r0_rate
from src.utils.combinatorics import binomial, log_binomial, log_binomial_big, log_falling_ratio

CSV_HEADER = "n,a,b,c,log_K,log_F,log_Fstar,ratio,claim2_exp,claim3_stat,degenerate"


@dataclass(frozen=True)
class AsymptoticParams:
    epsilon: float
    n: int
    c: int
    a: int
    b: int

    @property
    def feasible(self) -> bool:
        return self.b >= 0


def params_from_epsilon(epsilon: float, n: int) -> AsymptoticParams:
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    c = math.ceil(1 + 1 / epsilon)
    a = math.ceil(math.log(n) ** c)
    return AsymptoticParams(epsilon=epsilon, n=n, c=c, a=a, b=n - a - c)


@dataclass
class AnalysisRow:
    n: int
    a: int
    b: int
    c: int
    log_K: float
    log_F: float
    log_Fstar: float
    ratio_R_over_R0: Fraction
    claim2_exponent: float
    claim3_statistic: float
    claim2_margin: float        # log_F - ((n-b)/a) * log_K, negative below the bound
    degenerate: bool
    exact: bool = False
    ratio_direct: Optional[Fraction] = None
    dual_path_ok: Optional[bool] = None
    claim1_chain: Optional[bool] = None

    @property
    def ratio_float(self) -> float:
        return float(self.ratio_R_over_R0)

    def to_csv(self) -> str:
        ratio = str(self.ratio_R_over_R0) if self.exact else f"{self.ratio_float:.12g}"
        return ",".join([
            str(self.n), str(self.a), str(self.b), str(self.c),
            f"{self.log_K:.12g}", f"{self.log_F:.12g}", f"{self.log_Fstar:.12g}",
            ratio,
            f"{self.claim2_exponent:.12g}", f"{self.claim3_statistic:.12g}",
            "true" if self.degenerate else "false",
        ])


def claim1_chain_holds(n: int, a: int, b: int, N: Optional[int] = None) -> bool:
    """R* >= R0 * (1/K + M/N) as exact rationals."""
    comparison = grouping_rate_vs_optimal(n, a, b, N)
    K = binomial(n, a)
    t = K - binomial(n - b, a)
    return comparison.Rstar >= comparison.R0 * (Fraction(1, K) + Fraction(t, K))


def evaluate_row(p: AsymptoticParams) -> AnalysisRow:
    if not p.feasible:
        raise DomainError(f"row n={p.n} is infeasible (b={p.b} < 0)")
    n, a, b, c = p.n, p.a, p.b, p.c
    inner_n = n - b
    if inner_n > config.INNER_BINOMIAL_MAX:
        raise GuardrailError(
            f"inner binomial C({inner_n}, {a}) exceeds the guardrail n-b <= {config.INNER_BINOMIAL_MAX}"
        )
    K = binomial(n, a)
    inner = binomial(inner_n, a)
    t = K - inner

    log_K = log_binomial(n, a)
    log_F = log_binomial(n, b)
    log_Fstar = log_binomial_big(K, inner)
    ratio = Fraction(t + 1, binomial(a + b, a))

    claim2 = log_F / log_K if log_K > 0 else float("nan")
    claim3 = log_Fstar / log_F ** c if log_F > 0 else float("nan")
    margin = log_F - (inner_n / a) * log_K if a > 0 else float("nan")

    row = AnalysisRow(
        n=n, a=a, b=b, c=c,
        log_K=log_K,
        log_F=log_F,
        log_Fstar=log_Fstar,
        ratio_R_over_R0=ratio,
        claim2_exponent=claim2,
        claim3_statistic=claim3,
        claim2_margin=margin,
        degenerate=inner == 0 or 2 * inner_n >= n,
    )
    if n <= config.EXACT_ROW_MAX_N:
        _attach_exact(row, K, inner)
    logger.debug(f"row n={n}: a={a} b={b} ratio~{row.ratio_float:.6g} degenerate={row.degenerate}")
    return row


def _attach_exact(row: AnalysisRow, K: int, inner: int) -> None:
    """Second evaluation path from exact big integers."""
    comparison = grouping_rate_vs_optimal(row.n, row.a, row.b)
    exact_logs = (
        math.log(K),
        math.log(binomial(row.n, row.b)),
        math.log(binomial(K, inner)),
    )
    close = all(
        math.isclose(got, want, rel_tol=1e-6, abs_tol=1e-9)
        for got, want in zip((row.log_K, row.log_F, row.log_Fstar), exact_logs)
    )
    row.exact = True
    row.ratio_direct = comparison.ratio_direct
    row.dual_path_ok = close and comparison.ratio_direct == row.ratio_R_over_R0
    row.claim1_chain = claim1_chain_holds(row.n, row.a, row.b)


# -----------------------------------------------------------
# Trend tables
# -----------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    name: str
    status: str          # "pass" | "fail" | "withheld"
    detail: str

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_comment(self) -> str:
        return f"# verdict {self.name}={self.status} {self.detail}"


@dataclass
class TrendTable:
    epsilon: float
    rows: List[AnalysisRow]
    verdicts: List[Verdict] = field(default_factory=list)
    skipped: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.verdicts) and all(v.passed for v in self.verdicts)

    @property
    def tail(self) -> List[AnalysisRow]:
        return self.rows[len(self.rows) // 2:]

    def to_csv(self) -> str:
        lines = [CSV_HEADER] + [row.to_csv() for row in self.rows]
        lines += [v.to_comment() for v in self.verdicts]
        for n in self.skipped:
            lines.append(f"# skipped n={n} infeasible (b < 0)")
        return "\n".join(lines) + "\n"


def _non_increasing(values: Sequence[float], slack: float) -> bool:
    return all(nxt <= prev + slack for prev, nxt in zip(values, values[1:]))


def _strictly_increasing(values: Sequence[float]) -> bool:
    return all(nxt > prev for prev, nxt in zip(values, values[1:]))


def _verdicts(table: TrendTable) -> List[Verdict]:
    names = ("ratio_to_one", "claim2_exponent", "claim3_growth", "claim2_strict")
    tail = table.tail
    degenerate = [row.n for row in tail if row.degenerate]
    if degenerate:
        detail = "degenerate tail rows n=" + ",".join(str(n) for n in degenerate)
        return [Verdict(name, "withheld", detail) for name in names]

    slack = config.TREND_MONOTONE_SLACK
    ratios = [row.ratio_float for row in tail]
    ratio_ok = _non_increasing(ratios, slack) and all(r >= 1 - slack for r in ratios)
    exponent_bound = 1 + table.epsilon
    exponents = [row.claim2_exponent for row in tail]
    stats = [row.claim3_statistic for row in tail]
    last = table.rows[-1]

    def status(ok: bool) -> str:
        return "pass" if ok else "fail"

    return [
        Verdict(names[0], status(ratio_ok), f"tail_ratios={','.join(f'{r:.6g}' for r in ratios)}"),
        Verdict(
            names[1],
            status(all(x <= exponent_bound for x in exponents)),
            f"max_exponent={max(exponents):.6g} bound={exponent_bound:.6g}",
        ),
        Verdict(
            names[2],
            status(_strictly_increasing(stats)),
            f"tail_stats={','.join(f'{s:.6g}' for s in stats)}",
        ),
        Verdict(names[3], status(last.claim2_margin < 0), f"n={last.n} margin={last.claim2_margin:.6g}"),
    ]


def trend_table(epsilon: float, n_values: Sequence[int]) -> TrendTable:
    """
    Rows for each feasible n, plus verdicts on the tail half of the rows.

    Raises InsufficientRangeError (carrying the evaluated rows) when fewer than
    MIN_TREND_ROWS rows are feasible.
    """
    values = [int(n) for n in n_values]
    if any(nxt <= prev for prev, nxt in zip(values, values[1:])):
        raise DomainError(f"n values must be strictly increasing, got {values}")

    table = TrendTable(epsilon=epsilon, rows=[])
    for n in values:
        p = params_from_epsilon(epsilon, n)
        if not p.feasible:
            logger.debug(f"skipping n={n}: b={p.b} < 0")
            table.skipped.append(n)
            continue
        table.rows.append(evaluate_row(p))

    if len(table.rows) < config.MIN_TREND_ROWS:
        raise InsufficientRangeError(
            f"{len(table.rows)} feasible rows, trend verdicts need at least {config.MIN_TREND_ROWS}",
            rows=table.rows,
        )
    table.verdicts = _verdicts(table)
    logger.info(
        f"trend table eps={epsilon}: {len(table.rows)} rows, "
        + ", ".join(f"{v.name}={v.status}" for v in table.verdicts)
    )
    return table


def parse_n_values(text: str) -> List[int]:
    """Comma-separated n values; scientific forms like 1e6 are accepted when integral."""
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            value = float(part) if any(ch in part for ch in "eE.") else int(part)
        except ValueError:
            raise DomainError(f"n value {part!r} is not a number") from None
        if value != int(value):
            raise DomainError(f"n value {part!r} is not an integer")
        out.append(int(value))
    return out


def geometric_range(start: int, stop: int, factor: int) -> List[int]:
    if start < 2 or factor < 2 or stop < start:
        raise DomainError(f"bad geometric range start={start} stop={stop} factor={factor}")
    out = []
    n = start
    while n <= stop:
        out.append(n)
        n *= factor
    return out


# -----------------------------------------------------------
# Binomial approximation sandwich
# -----------------------------------------------------------

@dataclass(frozen=True)
class ApproxBinRow:
    n: int
    f: int
    g: int
    log_product: float
    lower: float
    exp_bound: float

    @property
    def product(self) -> float:
        return math.exp(self.log_product)

    @property
    def sandwich_holds(self) -> bool:
        return self.lower - config.SANDWICH_SLACK <= self.product <= 1.0

    @property
    def above_exp_bound(self) -> bool:
        return self.f == 0 or self.product > self.exp_bound


def ceil_log(n: int) -> int:
    return math.ceil(math.log(n))


def identity(n: int) -> int:
    return n


def a_of_epsilon(epsilon: float) -> Callable[[int], int]:
    return lambda n: params_from_epsilon(epsilon, n).a


def approx_bin_check(
    f_desc: Callable[[int], int],
    g_desc: Callable[[int], int],
    n_values: Sequence[int],
    delta: Optional[float] = None,
) -> List[ApproxBinRow]:
    """
    C(g,f) * f! / g^f for each n, in log domain.

    The lower edge is (1 - f/g)^f and the exponential bound exp(-f^2/g*(1+delta));
    f(n)^2/g(n) -> 0 is the caller's claim about the pair.
    """
    delta = config.APPROX_BIN_DELTA if delta is None else delta
    rows = []
    for n in n_values:
        f, g = int(f_desc(n)), int(g_desc(n))
        if f < 0 or g < 1:
            raise DomainError(f"approx_bin needs f >= 0 and g >= 1, got f={f}, g={g} at n={n}")
        log_product = log_falling_ratio(g, f)
        lower = math.exp(f * math.log1p(-f / g)) if f < g else 0.0
        exp_bound = float(np.exp(-(f * f / g) * (1 + delta)))
        rows.append(ApproxBinRow(n=n, f=f, g=g, log_product=log_product, lower=lower, exp_bound=exp_bound))
    return rows


def rate_gap(K: int, N: int, t: int) -> Fraction:
    """R0 - R* at (K, N, t); zero whenever N >= K."""
    return r0_rate(K, t) - optimal_rate_for(K, N, t)
