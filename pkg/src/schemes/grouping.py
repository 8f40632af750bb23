"""
The grouping scheme over an n-element ground set.

Users are the a-subsets of [n] (addressed by colex rank), subfile slots are
the b-subsets, and user A caches slot B of every file iff A and B intersect.
For every (a+b)-subset C the server sends
    Y_C = XOR over a-subsets A' of C of W_{d_A', C minus A'}
which every user A inside C can use to recover W_{d_A, C minus A}.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from src.errors import ConsistencyError, InfeasibleParametersError
from src.schemes.common import (
    CacheBank,
    DecodePlan,
    MessageLabels,
    Transmission,
    TransmissionLog,
    UserCache,
    decode_stacked,
    decode_user,
    xor_gather,
)
from src.schemes.model import (
    CachingScheme,
    DemandVector,
    PlacementProfile,
    SchemeParams,
    optimal_rate_for,
    r0_rate,
)
from src.utils.combinatorics import (
    KSubset,
    binomial,
    enumerate_ksubsets,
    format_subset,
    ksubset_rank,
    subset_to_mask,
)


@dataclass(frozen=True)
class GroupingParams:
    n: int
    a: int
    b: int

    def __post_init__(self):
        if self.n < 1:
            raise InfeasibleParametersError(f"ground set size n must be positive, got {self.n}")
        if self.a < 0 or self.b < 0:
            raise InfeasibleParametersError(f"a and b must be non-negative (a={self.a}, b={self.b})")
        if self.a + self.b > self.n:
            raise InfeasibleParametersError(
                f"a + b must not exceed n (a={self.a}, b={self.b}, n={self.n})"
            )

    @property
    def K(self) -> int:
        return binomial(self.n, self.a)

    @property
    def F(self) -> int:
        return binomial(self.n, self.b)

    @property
    def Z(self) -> int:
        return binomial(self.n, self.b) - binomial(self.n - self.a, self.b)

    @property
    def t(self) -> int:
        return binomial(self.n, self.a) - binomial(self.n - self.b, self.a)

    @property
    def cache_ratio(self) -> Fraction:
        return Fraction(self.Z, self.F)

    @property
    def nominal_rate(self) -> Fraction:
        """C(n, a+b) / C(n, b)."""
        return Fraction(binomial(self.n, self.a + self.b), self.F)


class GroupingLayout:
    """Label bookkeeping for one (n, a, b) instance."""

    def __init__(self, params: GroupingParams):
        self.params = params
        self.n, self.a, self.b = params.n, params.a, params.b
        self.width = binomial(self.a + self.b, self.a)
        self._plans: Dict[int, DecodePlan] = {}

    @cached_property
    def users(self) -> List[KSubset]:
        return list(enumerate_ksubsets(self.n, self.a))

    @cached_property
    def slots(self) -> List[KSubset]:
        return list(enumerate_ksubsets(self.n, self.b))

    def user_slots(self, user: int) -> frozenset:
        mask = subset_to_mask(self.users[user])
        return frozenset(
            r for r, B in enumerate(self.slots) if subset_to_mask(B) & mask
        )

    @cached_property
    def delivery_sets(self) -> List[Tuple[KSubset, Tuple[int, ...], Tuple[int, ...]]]:
        """Each (a+b)-set C with the ranks of its a-subsets A' and of C minus A'."""
        out = []
        for C in enumerate_ksubsets(self.n, self.a + self.b):
            user_ranks, slot_ranks = [], []
            for A in enumerate_ksubsets(len(C), self.a):
                inside = tuple(C[i] for i in A)
                rest = tuple(x for x in C if x not in inside)
                user_ranks.append(ksubset_rank(inside, self.n))
                slot_ranks.append(ksubset_rank(rest, self.n))
            out.append((C, tuple(user_ranks), tuple(slot_ranks)))
        return out

    @cached_property
    def messages(self) -> MessageLabels:
        return MessageLabels([(0, C) for C, _, _ in self.delivery_sets])

    @cached_property
    def message_ids(self) -> np.ndarray:
        ids = np.arange(len(self.delivery_sets), dtype=np.intp)
        ids.setflags(write=False)
        return ids

    @cached_property
    def message_users(self) -> np.ndarray:
        """(C(n,a+b), C(a+b,a)) user ranks A' inside each C."""
        return np.array([u for _, u, _ in self.delivery_sets], dtype=np.intp).reshape(-1, self.width)

    @cached_property
    def message_slots(self) -> np.ndarray:
        """(C(n,a+b), C(a+b,a)) slot ranks C minus A'."""
        return np.array([s for _, _, s in self.delivery_sets], dtype=np.intp).reshape(-1, self.width)

    def plan(self, user: int) -> DecodePlan:
        if user not in self._plans:
            self._plans[user] = self._build_plan(user)
        return self._plans[user]

    @cached_property
    def stacked_plan(self) -> DecodePlan:
        return DecodePlan.stack([self.plan(u) for u in range(self.params.K)])

    def _build_plan(self, user: int) -> DecodePlan:
        A = self.users[user]
        cached = np.array(sorted(self.user_slots(user)), dtype=np.intp)
        position = {int(s): p for p, s in enumerate(cached)}
        missing, messages, cancel_users, cancel_pos = [], [], [], []
        for r, B in enumerate(self.slots):
            if set(A) & set(B):
                continue
            C = tuple(sorted(A + B))
            users_row, pos_row = [], []
            for pick in enumerate_ksubsets(len(C), self.a):
                other = tuple(C[i] for i in pick)
                if other == A:
                    continue
                rest = tuple(x for x in C if x not in other)
                users_row.append(ksubset_rank(other, self.n))
                pos_row.append(position[ksubset_rank(rest, self.n)])
            missing.append(r)
            messages.append(ksubset_rank(C, self.n))
            cancel_users.append(users_row)
            cancel_pos.append(pos_row)
        m = len(missing)
        return DecodePlan(
            cached=cached,
            missing=np.array(missing, dtype=np.intp),
            messages=np.array(messages, dtype=np.intp),
            cancel_users=np.array(cancel_users, dtype=np.intp).reshape(m, self.width - 1),
            cancel_pos=np.array(cancel_pos, dtype=np.intp).reshape(m, self.width - 1),
        )


def grouping_placement(n: int, a: int, b: int, N: Optional[int] = None) -> Tuple[SchemeParams, PlacementProfile]:
    """User A caches slot B iff A ∩ B is non-empty; N defaults to K."""
    return _placement_for(GroupingLayout(GroupingParams(n, a, b)), N)


def _placement_for(layout: GroupingLayout, N: Optional[int]) -> Tuple[SchemeParams, PlacementProfile]:
    gp = layout.params
    files = gp.K if N is None else N
    params = SchemeParams.build(K=gp.K, N=files, cache_ratio=gp.cache_ratio, F=gp.F)
    placement = PlacementProfile(
        F=gp.F,
        user_slots=tuple(layout.user_slots(u) for u in range(gp.K)),
    )
    return params, placement


def grouping_delivery(layout: GroupingLayout, store_blocks: np.ndarray, demand: DemandVector) -> TransmissionLog:
    """One Y_C per (a+b)-subset C in colex order, whatever the demand."""
    files = np.asarray(demand.files, dtype=np.intp)[layout.message_users]
    slots = layout.message_slots
    payloads = xor_gather(store_blocks, files, slots)
    logger.opt(lazy=True).debug(
        "grouping delivery: {} messages for demand {}", lambda: len(payloads), demand.render,
    )
    return TransmissionLog(
        layout.message_ids, payloads, files, slots, layout.messages.keys, store_blocks.shape[2]
    )


def grouping_message_table(layout: GroupingLayout, log: TransmissionLog) -> np.ndarray:
    """Every Y_C by colex rank of C; all of them must be in the log."""
    return layout.messages.table(log, layout.message_ids)


def grouping_decode(
    layout: GroupingLayout,
    user: int,
    cache: UserCache,
    log: TransmissionLog,
    demand: DemandVector,
    table: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Missing slot B is Y_{A∪B} with every cached W_{d_A', C minus A'} (A' != A) XORed out."""
    if table is None:
        table = grouping_message_table(layout, log)
    files = np.asarray(demand.files, dtype=np.intp)
    return decode_user(layout.plan(user), cache.blocks, files, demand.files[user], table)


# -----------------------------------------------------------
# Rate comparison against the optimum
# -----------------------------------------------------------

@dataclass(frozen=True)
class RateComparison:
    n: int
    a: int
    b: int
    N: int
    R: Fraction
    R0: Fraction
    Rstar: Fraction
    ratio_direct: Fraction
    ratio_closed: Fraction

    @property
    def ratio_R_over_R0(self) -> Fraction:
        return self.ratio_closed

    @property
    def paths_agree(self) -> bool:
        return self.ratio_direct == self.ratio_closed

    @property
    def above_optimum(self) -> bool:
        return self.R >= self.Rstar

    @property
    def gap(self) -> Fraction:
        return self.R - self.Rstar


def grouping_rate_vs_optimal(n: int, a: int, b: int, N: Optional[int] = None) -> RateComparison:
    """
    R, the intermediate rate R0 = C(n-b,a)/(1 + C(n,a) - C(n-b,a)), and R* at
    the same (K, t). R/R0 is evaluated directly and through the closed form
    (C(n,a) - C(n-b,a) + 1) / C(a+b,a).

    Raises ConsistencyError unless both paths agree and R >= R*.
    """
    gp = GroupingParams(n, a, b)
    K, t = gp.K, gp.t
    files = K if N is None else N
    R = gp.nominal_rate
    R0 = r0_rate(K, t)
    closed = Fraction(K - binomial(n - b, a) + 1, binomial(a + b, a))
    comparison = RateComparison(
        n=n, a=a, b=b, N=files,
        R=R,
        R0=R0,
        Rstar=optimal_rate_for(K, files, t),
        ratio_direct=R / R0,
        ratio_closed=closed,
    )
    if not comparison.paths_agree:
        raise ConsistencyError(
            f"R/R0 for n={n} a={a} b={b}: direct {comparison.ratio_direct} != closed form {comparison.ratio_closed}"
        )
    if not comparison.above_optimum:
        raise ConsistencyError(f"grouping rate {R} below R*={comparison.Rstar} for n={n} a={a} b={b} N={files}")
    return comparison


def verify_lower1(n: int, a: int, b: int) -> bool:
    """C(a+b,a) + C(n-b,a) <= C(n,a) + 1."""
    GroupingParams(n, a, b)
    return binomial(a + b, a) + binomial(n - b, a) <= binomial(n, a) + 1


class GroupingScheme(CachingScheme):
    name = "grouping"

    def __init__(self, n: int, a: int, b: int, N: Optional[int] = None):
        self.grouping = GroupingParams(n, a, b)
        self.layout = GroupingLayout(self.grouping)
        params, placement = _placement_for(self.layout, N)
        super().__init__(params, placement)
        logger.info(
            f"grouping placement: n={n} a={a} b={b} K={params.K} N={params.N} "
            f"F={params.F} Z={params.Z} t={params.t}"
        )

    def describe(self) -> str:
        g = self.grouping
        return f"n={g.n} a={g.a} b={g.b} N={self.N}"

    def transcript_header(self, demand: DemandVector) -> str:
        return f"scheme={self.name} {self.describe()}"

    def deliver(self, store_blocks: np.ndarray, demand: DemandVector) -> TransmissionLog:
        self.check_demand(demand)
        return grouping_delivery(self.layout, store_blocks, demand)

    def decoding_context(self, log: TransmissionLog, demand: DemandVector) -> np.ndarray:
        return grouping_message_table(self.layout, log)

    def decode(self, user, cache, log, demand, context) -> np.ndarray:
        return grouping_decode(self.layout, user, cache, log, demand, context)

    def decode_all(self, caches: CacheBank, log, demand, context) -> np.ndarray:
        files = np.asarray(demand.files, dtype=np.intp)
        return decode_stacked(self.layout.stacked_plan, caches.stacked, files, context)

    def format_transmission(self, tx: Transmission) -> str:
        return f"Y C={format_subset(tx.subset)} payload={tx.payload_hex()}"

    def expected_count(self, demand: DemandVector) -> int:
        return binomial(self.grouping.n, self.grouping.a + self.grouping.b)
