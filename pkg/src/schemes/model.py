"""
Symmetric uncoded caching: the scheme contract and its checkable structure.

Holds the parameter tuple, the placement profile (per-user cached slot sets),
demand vectors, the symmetry validator, the two counting identities, the
divisibility condition and the closed-form optimum R*, F*.
"""

import math
import operator
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from loguru import logger

import config
from src.errors import DomainError, GuardrailError, InfeasibleParametersError
from src.schemes.common import render_transcript
from src.utils.combinatorics import binomial


# -----------------------------------------------------------
# 1. Parameters
# -----------------------------------------------------------

@dataclass(frozen=True)
class SchemeParams:
    """(K, N, M/N, F, t, Z, h) with the cache ratio kept as an exact rational."""
    K: int
    N: int
    cache_ratio: Fraction
    F: int
    t: int
    Z: int
    h: int = 1

    def __post_init__(self):
        if self.K < 1 or self.N < 1 or self.F < 1 or self.h < 1:
            raise InfeasibleParametersError(
                f"K, N, F, h must be positive (K={self.K}, N={self.N}, F={self.F}, h={self.h})"
            )
        if not 0 <= self.cache_ratio <= 1:
            raise InfeasibleParametersError(f"cache ratio M/N={self.cache_ratio} outside [0, 1]")
        if self.K * self.cache_ratio != self.t:
            raise InfeasibleParametersError(
                f"t = K*M/N not integral or inconsistent (K={self.K}, M/N={self.cache_ratio}, t={self.t})"
            )
        if self.F * self.cache_ratio != self.Z:
            raise InfeasibleParametersError(
                f"Z = M*F/N not integral or inconsistent (F={self.F}, M/N={self.cache_ratio}, Z={self.Z})"
            )
        if self.Z * self.K != self.t * self.F:
            raise InfeasibleParametersError("Z*K != t*F")

    @classmethod
    def build(cls, K: int, N: int, cache_ratio, F: int, h: int = 1) -> "SchemeParams":
        ratio = Fraction(cache_ratio)
        t = K * ratio
        if t.denominator != 1:
            raise InfeasibleParametersError(f"t = K*M/N not integral (K={K}, M/N={ratio})")
        z = F * ratio
        if z.denominator != 1:
            raise InfeasibleParametersError(f"Z = M*F/N not integral (F={F}, M/N={ratio})")
        return cls(K=K, N=N, cache_ratio=ratio, F=F, t=int(t), Z=int(z), h=h)

    @property
    def M(self) -> Fraction:
        return self.cache_ratio * self.N


# -----------------------------------------------------------
# 2. Placement and demand
# -----------------------------------------------------------

@dataclass(frozen=True)
class PlacementProfile:
    """U_1..U_K: the slot indices each user caches (of every file)."""
    F: int
    user_slots: Tuple[FrozenSet[int], ...]

    @property
    def K(self) -> int:
        return len(self.user_slots)

    def masks(self) -> List[int]:
        out = []
        for slots in self.user_slots:
            mask = 0
            for s in slots:
                mask |= 1 << s
            out.append(mask)
        return out

    def multiplicities(self) -> np.ndarray:
        counts = np.zeros(self.F, dtype=np.int64)
        for slots in self.user_slots:
            for s in slots:
                if 0 <= s < self.F:
                    counts[s] += 1
        return counts

    def replication(self) -> int:
        """t recovered from the placement; DomainError unless it is integral."""
        total = sum(len(s) for s in self.user_slots)
        if total % self.F:
            raise DomainError(f"placement memberships ({total}) not a multiple of F={self.F}")
        return total // self.F


@dataclass(frozen=True)
class DemandVector:
    """d_u = file requested by user u (0-based)."""
    files: Tuple[int, ...]
    N: int

    def __post_init__(self):
        if not self.files:
            raise DomainError("demand vector must name at least one user")
        for u, f in enumerate(self.files):
            if not 0 <= f < self.N:
                raise DomainError(f"user {u + 1} requests file index {f} outside [0, {self.N})")

    @property
    def K(self) -> int:
        return len(self.files)

    @property
    def e(self) -> int:
        return len(set(self.files))

    def render(self) -> str:
        return ",".join(str(f) for f in self.files)

    def pattern(self) -> Tuple[int, ...]:
        """Relabel files by first occurrence (restricted growth form)."""
        seen: Dict[int, int] = {}
        return tuple(seen.setdefault(f, len(seen)) for f in self.files)


# -----------------------------------------------------------
# 3. Symmetry validation
# -----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    user: Optional[int]
    slot: Optional[int]
    expected: Any
    got: Any

    def to_line(self) -> str:
        user = "-" if self.user is None else str(self.user + 1)
        slot = "-" if self.slot is None else str(self.slot)
        return f"{self.kind} user={user} slot={slot} expected={self.expected} got={self.got}"


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_text(self) -> str:
        return "".join(v.to_line() + "\n" for v in self.violations)


def validate_symmetric(params: SchemeParams, placement: PlacementProfile) -> ValidationReport:
    """Every user caches Z slots and every slot is held by exactly t users."""
    report = ValidationReport()
    if placement.K != params.K:
        report.violations.append(Violation("user_count", None, None, params.K, placement.K))
    if placement.F != params.F:
        report.violations.append(Violation("slot_count", None, None, params.F, placement.F))

    for user, slots in enumerate(placement.user_slots):
        for s in sorted(slots):
            if not 0 <= s < params.F:
                report.violations.append(Violation("slot_range", user, s, f"<{params.F}", s))
        if len(slots) != params.Z:
            report.violations.append(Violation("cache_size", user, None, params.Z, len(slots)))

    counts = placement.multiplicities()
    for slot in range(min(params.F, placement.F)):
        got = int(counts[slot])
        if got != params.t:
            report.violations.append(Violation("slot_multiplicity", None, slot, params.t, got))

    if report.valid:
        logger.debug(f"placement symmetric: K={params.K} F={params.F} Z={params.Z} t={params.t}")
    else:
        logger.debug(f"placement has {len(report.violations)} symmetry violations")
    return report


# -----------------------------------------------------------
# 4. Counting identities
# -----------------------------------------------------------

@dataclass(frozen=True)
class IdentityCheck:
    k: int
    lhs: int
    rhs: int
    method: str

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def _pick_method(K: int, method: str) -> str:
    guardrail = config.IDENTITY_SUBSET_GUARDRAIL_K
    if method == "auto":
        return "subsets" if K <= guardrail else "slots"
    if method == "subsets" and K > guardrail:
        raise GuardrailError(
            f"user-subset enumeration refused for K={K} > {guardrail}; use method='slots'"
        )
    if method not in {"subsets", "slots"}:
        raise DomainError(f"unknown identity method {method!r}")
    return method


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _union_sizes(masks: List[int], k: int) -> int:
    """
    Sum over k-subsets of |union|, walking prefixes depth first.

    A prefix whose union is already everything counts all its completions at once.
    """
    K = len(masks)
    full = reduce(operator.or_, masks, 0)
    width = _popcount(full)

    def walk(first: int, depth: int, acc: int) -> int:
        if acc == full:
            return width * binomial(K - first, k - depth)
        if depth == k:
            return _popcount(acc)
        return sum(walk(i + 1, depth + 1, acc | masks[i]) for i in range(first, K - k + depth + 1))

    return walk(0, 0, 0)


def _intersection_sizes(masks: List[int], k: int) -> int:
    """Sum over k-subsets of |intersection|; an empty prefix contributes nothing."""
    K = len(masks)

    def walk(first: int, depth: int, acc: int) -> int:
        if acc == 0:
            return 0
        if depth == k:
            return _popcount(acc)
        return sum(walk(i + 1, depth + 1, acc & masks[i]) for i in range(first, K - k + depth + 1))

    return walk(0, 0, reduce(operator.or_, masks, 0))


def union_count_identity(placement: PlacementProfile, k: int, method: str = "auto") -> IdentityCheck:
    """
    Sum over k-subsets of users of |U_d1 ∪ ... ∪ U_dk| against F*(C(K,k) - C(K-t,k)).

    `subsets` enumerates user k-subsets directly; `slots` counts, for each slot,
    the k-subsets that meet its holder set, from the slot's actual holder count.
    """
    K = placement.K
    if not 1 <= k <= K:
        raise DomainError(f"union identity needs 1 <= k <= K={K}, got k={k}")
    t = placement.replication()
    rhs = placement.F * (binomial(K, k) - binomial(K - t, k))
    chosen = _pick_method(K, method)

    if chosen == "subsets":
        lhs = _union_sizes(placement.masks(), k)
    else:
        lhs = sum(binomial(K, k) - binomial(K - int(m), k) for m in placement.multiplicities())
    return IdentityCheck(k=k, lhs=lhs, rhs=rhs, method=chosen)


def intersection_count_identity(placement: PlacementProfile, k: int, method: str = "auto") -> IdentityCheck:
    """Sum over k-subsets of users of |U_d1 ∩ ... ∩ U_dk| against C(t,k)*F."""
    K = placement.K
    t = placement.replication()
    if not 1 <= k <= t:
        raise DomainError(f"intersection identity needs 1 <= k <= t={t}, got k={k}")
    rhs = binomial(t, k) * placement.F
    chosen = _pick_method(K, method)

    if chosen == "subsets":
        lhs = _intersection_sizes(placement.masks(), k)
    else:
        lhs = sum(binomial(int(m), k) for m in placement.multiplicities())
    return IdentityCheck(k=k, lhs=lhs, rhs=rhs, method=chosen)


# -----------------------------------------------------------
# 5. Optimum and divisibility
# -----------------------------------------------------------

def divisibility_check(params: SchemeParams) -> bool:
    """F ≡ 0 (mod C(K, t))."""
    return params.F % binomial(params.K, params.t) == 0


def optimal_rate_for(K: int, N: int, t: int) -> Fraction:
    if not 0 <= t <= K:
        raise InfeasibleParametersError(f"t={t} outside [0, K={K}]")
    leftover = binomial(K - min(K, N), t + 1)
    if leftover == 0:
        # C(K, t) is not formed when the correction term vanishes
        return Fraction(K - t, 1 + t)
    return Fraction(K - t, 1 + t) - Fraction(leftover, binomial(K, t))


def optimal_rate(params: SchemeParams) -> Fraction:
    """R* = (K-t)/(1+t) - C(K-min(K,N), t+1)/C(K,t)."""
    return optimal_rate_for(params.K, params.N, params.t)


def optimal_subpacketization(params: SchemeParams) -> int:
    """F* = C(K, t)."""
    return binomial(params.K, params.t)


def r0_rate(K: int, t: int) -> Fraction:
    """R0 = (K-t)/(1+t), the first term of R*; R0 >= R*."""
    return Fraction(K - t, 1 + t)


def feasible_regime(K: int, N: int, t: int) -> bool:
    """M/N <= min(K,N)/K, where divisibility characterizes optimal schemes."""
    return t <= min(K, N)


@dataclass(frozen=True)
class CongruenceReport:
    """Moduli m_k = C(K,k)/gcd(C(K,k), C(t,k)) that F must be divisible by."""
    K: int
    t: int
    N: int
    moduli: Tuple[Tuple[int, int], ...]

    @property
    def applies(self) -> bool:
        return self.K > self.N and self.t > self.N

    @property
    def lcm(self) -> int:
        out = 1
        for _, m in self.moduli:
            out = out * m // math.gcd(out, m)
        return out

    def satisfied_by(self, F: int) -> bool:
        return all(F % m == 0 for _, m in self.moduli)


def congruence_moduli(K: int, t: int, N: int) -> CongruenceReport:
    """
    Congruences on F forced by the intersection identity for k = 1..min(N, t).

    Only evaluates the congruences; whether they force F >= F* in the regime
    K > N, t > N is left open.
    """
    moduli = []
    for k in range(1, min(N, t) + 1):
        ck = binomial(K, k)
        moduli.append((k, ck // math.gcd(ck, binomial(t, k))))
    return CongruenceReport(K=K, t=t, N=N, moduli=tuple(moduli))


# -----------------------------------------------------------
# 6. Scheme contract
# -----------------------------------------------------------

class CachingScheme(ABC):
    """
    A symmetric uncoded caching scheme over real byte payloads.

    Subclasses fix the placement at construction and implement delivery
    and per-user decoding over a read-only transmission log.
    """

    name: str = "scheme"

    def __init__(self, params: SchemeParams, placement: PlacementProfile):
        self.params = params
        self.placement = placement

    @property
    def K(self) -> int:
        return self.params.K

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def F(self) -> int:
        return self.params.F

    @abstractmethod
    def describe(self) -> str:
        """Parameter fragment for records, e.g. 'K=3 N=3 t=1 h=1'."""

    @abstractmethod
    def deliver(self, store_blocks: np.ndarray, demand: DemandVector):
        """Return the TransmissionLog for this demand."""

    @abstractmethod
    def decoding_context(self, log, demand: DemandVector) -> Any:
        """Per-demand state shared by all decoding users (e.g. recovered messages)."""

    @abstractmethod
    def decode(self, user: int, cache, log, demand: DemandVector, context: Any) -> np.ndarray:
        """Reconstruct the (F, L) blocks of file d_user."""

    def decode_all(self, caches, log, demand: DemandVector, context: Any) -> np.ndarray:
        """(K, F, L) blocks for every user; each user reads only its own cache."""
        return np.stack([
            self.decode(user, cache, log, demand, context) for user, cache in enumerate(caches)
        ])

    @abstractmethod
    def format_transmission(self, tx) -> str:
        """One transcript line."""

    @abstractmethod
    def expected_count(self, demand: DemandVector) -> int:
        """Number of messages the delivery rule sends for this demand."""

    def transcript_header(self, demand: DemandVector) -> str:
        return f"scheme={self.name} {self.describe()} demand={demand.render()}"

    def transcript(self, demand: DemandVector, log) -> str:
        return render_transcript(
            self.transcript_header(demand),
            (self.format_transmission(tx) for tx in log),
        )

    def check_demand(self, demand: DemandVector) -> None:
        if demand.K != self.K:
            raise DomainError(f"demand has {demand.K} entries, scheme has K={self.K} users")
        if demand.N != self.N:
            raise DomainError(f"demand is over N={demand.N} files, scheme has N={self.N}")
