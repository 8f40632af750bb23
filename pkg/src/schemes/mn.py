"""
The optimal symmetric scheme: subfile slots labeled (j, S) with |S| = t,
leader-based XOR delivery, and recovery of the messages the server skips.

Slot (j, S) lives at index j*C(K,t) + colex rank of S. User u caches every
slot whose label S contains u. For a demand with e distinct files the server
only sends Y_{j,A} for the (t+1)-sets A that meet the leader set U; a user who
needs some other Y_{j,B} rebuilds it from
    XOR over V in 𝒱 of Y_{j, (B ∪ U) minus V} = 0
where 𝒱 holds the e-subsets of B ∪ U covering every requested file once.

Message Y_{j,A} has dense label id j*C(K,t+1) + colex rank of A. Which
labels are sent depends only on the leader set, and how unsent ones are
rebuilt only on the demand's pattern, so both are planned once and cached.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np
from loguru import logger

import config
from src.errors import ConsistencyError, DomainError, InfeasibleParametersError
from src.schemes.common import (
    CacheBank,
    DecodePlan,
    MessageLabels,
    Transmission,
    TransmissionKey,
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
)
from src.utils.combinatorics import (
    KSubset,
    binomial,
    enumerate_ksubsets,
    format_subset,
    ksubset_rank,
    ksubset_unrank,
)


@dataclass(frozen=True)
class MnSlot:
    j: int
    S: KSubset


@dataclass(frozen=True)
class LeaderSet:
    """One user per distinct requested file; `files[i]` is what `users[i]` requests."""
    users: Tuple[int, ...]
    files: Tuple[int, ...]

    @property
    def e(self) -> int:
        return len(self.users)

    @cached_property
    def members(self) -> frozenset:
        return frozenset(self.users)

    def meets(self, subset: KSubset) -> bool:
        return not self.members.isdisjoint(subset)


@dataclass(frozen=True)
class RecoveryPlan:
    """Sent and unsent labels for one demand pattern, in dense label ids."""
    leaders: Tuple[int, ...]
    sent: np.ndarray          # (s,) ascending: replica-major, colex within a replica
    unsent: np.ndarray        # (r,)
    terms: np.ndarray         # (r, w) sent labels XORing to each unsent one, padded with the zero row


def _recovery_sets(
    B: KSubset,
    leaders: Tuple[int, ...],
    leader_files: Tuple[int, ...],
    files: Sequence[int],
) -> Iterator[KSubset]:
    """The sets (B ∪ U) minus V for every V in 𝒱 other than U itself."""
    C = tuple(sorted(set(B) | set(leaders)))
    requesters = [[u for u in C if files[u] == f] for f in leader_files]
    for V in itertools.product(*requesters):
        if V == leaders:
            continue
        members = set(V)
        yield tuple(u for u in C if u not in members)


class MnLayout:
    """Slot and message indexing for the (K, t, h) scheme."""

    def __init__(self, K: int, t: int, h: int = 1):
        if K < 1:
            raise InfeasibleParametersError(f"K must be positive, got {K}")
        if t < 0 or t > K:
            raise InfeasibleParametersError(f"t must lie in [0, K={K}], got {t}")
        if h < 1:
            raise InfeasibleParametersError(f"h must be positive, got {h}")
        self.K = K
        self.t = t
        self.h = h
        self.block = binomial(K, t)
        self.F = h * self.block
        self.per_replica = binomial(K, t + 1)
        self._plans: Dict[int, DecodePlan] = {}
        self.sent_messages = lru_cache(maxsize=config.PLAN_CACHE_SIZE)(self._sent_messages)
        self.recovery_plan = lru_cache(maxsize=config.PLAN_CACHE_SIZE)(self._recovery_plan)

    def slot_index(self, j: int, S: KSubset) -> int:
        if not 0 <= j < self.h:
            raise DomainError(f"replica index {j} outside [0, {self.h})")
        if len(S) != self.t:
            raise DomainError(f"slot label {S} must have {self.t} users")
        return j * self.block + ksubset_rank(S, self.K)

    def slot_of(self, index: int) -> MnSlot:
        if not 0 <= index < self.F:
            raise DomainError(f"slot index {index} outside [0, {self.F})")
        j, r = divmod(index, self.block)
        return MnSlot(j=j, S=ksubset_unrank(r, self.K, self.t))

    @cached_property
    def labels(self) -> List[KSubset]:
        return list(enumerate_ksubsets(self.K, self.t))

    @cached_property
    def message_sets(self) -> List[KSubset]:
        """The (t+1)-sets A in colex order."""
        return list(enumerate_ksubsets(self.K, self.t + 1))

    @cached_property
    def messages(self) -> MessageLabels:
        return MessageLabels([(j, A) for j in range(self.h) for A in self.message_sets])

    def message_id(self, j: int, A: KSubset) -> int:
        return j * self.per_replica + ksubset_rank(A, self.K)

    @cached_property
    def message_users(self) -> np.ndarray:
        """(h*C(K,t+1), t+1): the users of A for every label (j, A)."""
        users = np.array(self.message_sets, dtype=np.intp).reshape(self.per_replica, self.t + 1)
        return np.tile(users, (self.h, 1))

    @cached_property
    def message_slots(self) -> np.ndarray:
        """(h*C(K,t+1), t+1): slot (j, A minus i) for every i in A."""
        ranks = np.array(
            [[ksubset_rank(A[:k] + A[k + 1:], self.K) for k in range(len(A))] for A in self.message_sets],
            dtype=np.intp,
        ).reshape(self.per_replica, self.t + 1)
        return np.concatenate([ranks + j * self.block for j in range(self.h)])

    def _replicate(self, ranks: np.ndarray) -> np.ndarray:
        offsets = np.arange(self.h, dtype=np.intp)[:, None] * self.per_replica
        return (ranks[None, :] + offsets).ravel()

    def _sent_messages(self, leaders: Tuple[int, ...]) -> np.ndarray:
        """Dense ids of every Y_{j,A} with A meeting the leaders."""
        is_leader = np.zeros(self.K, dtype=bool)
        is_leader[list(leaders)] = True
        meets = is_leader[self.message_users[: self.per_replica]].any(axis=1)
        sent = self._replicate(np.flatnonzero(meets))
        sent.setflags(write=False)
        return sent

    def _recovery_plan(self, pattern: Tuple[int, ...]) -> RecoveryPlan:
        seen: Dict[int, int] = {}
        for u, cls in enumerate(pattern):
            seen.setdefault(cls, u)
        leaders = tuple(sorted(seen.values()))
        classes = tuple(range(len(leaders)))
        members = set(leaders)

        unsent_ranks, rows = [], []
        for r, B in enumerate(self.message_sets):
            if members.isdisjoint(B):
                unsent_ranks.append(r)
                rows.append([
                    ksubset_rank(rest, self.K)
                    for rest in _recovery_sets(B, leaders, classes, pattern)
                ])
        width = max((len(row) for row in rows), default=0)
        base = np.full((len(rows), width), -1, dtype=np.intp)
        for i, row in enumerate(rows):
            base[i, : len(row)] = row
        zero_row = len(self.messages)
        terms = np.concatenate([
            np.where(base < 0, zero_row, base + j * self.per_replica) for j in range(self.h)
        ]) if rows else np.zeros((0, 0), dtype=np.intp)

        plan = RecoveryPlan(
            leaders=leaders,
            sent=self.sent_messages(leaders),
            unsent=self._replicate(np.array(unsent_ranks, dtype=np.intp)),
            terms=terms,
        )
        logger.debug(
            f"mn recovery plan K={self.K} t={self.t}: pattern {pattern}, "
            f"{len(plan.unsent)} unsent labels"
        )
        return plan

    def user_slots(self, user: int) -> frozenset:
        return frozenset(
            j * self.block + r
            for j in range(self.h)
            for r, S in enumerate(self.labels)
            if user in S
        )

    def plan(self, user: int) -> DecodePlan:
        if user not in self._plans:
            self._plans[user] = self._build_plan(user)
        return self._plans[user]

    @cached_property
    def stacked_plan(self) -> DecodePlan:
        return DecodePlan.stack([self.plan(u) for u in range(self.K)])

    def _build_plan(self, user: int) -> DecodePlan:
        cached = np.array(sorted(self.user_slots(user)), dtype=np.intp)
        position = {int(s): p for p, s in enumerate(cached)}
        missing, messages, cancel_users, cancel_pos = [], [], [], []
        for j in range(self.h):
            for r, S in enumerate(self.labels):
                if user in S:
                    continue
                B = tuple(sorted(S + (user,)))
                users_row, pos_row = [], []
                for k, i in enumerate(B):
                    if i == user:
                        continue
                    rest = B[:k] + B[k + 1:]
                    users_row.append(i)
                    pos_row.append(position[self.slot_index(j, rest)])
                missing.append(j * self.block + r)
                messages.append(self.message_id(j, B))
                cancel_users.append(users_row)
                cancel_pos.append(pos_row)
        m = len(missing)
        return DecodePlan(
            cached=cached,
            missing=np.array(missing, dtype=np.intp),
            messages=np.array(messages, dtype=np.intp),
            cancel_users=np.array(cancel_users, dtype=np.intp).reshape(m, self.t),
            cancel_pos=np.array(cancel_pos, dtype=np.intp).reshape(m, self.t),
        )


def mn_placement(K: int, N: int, t: int, h: int = 1) -> Tuple[SchemeParams, PlacementProfile]:
    """F = h*C(K,t); user u caches slot (j, S) iff u is in S."""
    return _placement_for(MnLayout(K, t, h), N)


def _placement_for(layout: MnLayout, N: int) -> Tuple[SchemeParams, PlacementProfile]:
    K, t, h = layout.K, layout.t, layout.h
    params = SchemeParams.build(K=K, N=N, cache_ratio=Fraction(t, K), F=layout.F, h=h)
    placement = PlacementProfile(
        F=layout.F,
        user_slots=tuple(layout.user_slots(u) for u in range(K)),
    )
    return params, placement


def choose_leaders(demand: DemandVector) -> LeaderSet:
    """Lowest-index requester of each distinct file."""
    first: Dict[int, int] = {}
    for u, f in enumerate(demand.files):
        first.setdefault(f, u)
    users = tuple(sorted(first.values()))
    return LeaderSet(users=users, files=tuple(demand.files[u] for u in users))


def transmission_count(K: int, t: int, h: int, e: int) -> int:
    """h*(C(K,t+1) - C(K-e,t+1)): the number of messages the leader rule sends."""
    return h * (binomial(K, t + 1) - binomial(K - e, t + 1))


def mn_delivery(
    layout: MnLayout,
    store_blocks: np.ndarray,
    demand: DemandVector,
    leaders: LeaderSet,
) -> TransmissionLog:
    """Y_{j,A} = XOR over i in A of W_{d_i, (j, A minus i)} for every A meeting U."""
    rows = layout.sent_messages(leaders.users)
    files = np.asarray(demand.files, dtype=np.intp)[layout.message_users[rows]]
    slots = layout.message_slots[rows]
    payloads = xor_gather(store_blocks, files, slots)
    logger.opt(lazy=True).debug(
        "mn delivery: {} messages for demand {} (e={})",
        lambda: len(rows), demand.render, lambda: leaders.e,
    )
    return TransmissionLog(rows, payloads, files, slots, layout.messages.keys, store_blocks.shape[2])


def mn_recover_unsent(
    j: int,
    B: KSubset,
    log: TransmissionLog,
    demand: DemandVector,
    leaders: LeaderSet,
) -> np.ndarray:
    """Rebuild Y_{j,B} for a B disjoint from the leaders out of messages that were sent."""
    if leaders.meets(B):
        raise DomainError(f"Y_{j},{format_subset(B)} meets the leader set and is sent directly")
    acc = np.zeros(log.length, dtype=np.uint8)
    for rest in _recovery_sets(B, leaders.users, leaders.files, demand.files):
        payload = log.get((j, rest))
        if payload is None:
            raise ConsistencyError(
                f"recovering Y j={j} A={format_subset(B)} needs Y j={j} "
                f"A={format_subset(rest)}, which was not sent"
            )
        np.bitwise_xor(acc, payload, out=acc)
    return acc


@dataclass
class MnDecodeContext:
    """
    Per-demand state shared by decoding users: every message, sent or
    recovered, in a table indexed by dense label id. Each unsent message is
    recovered once, when the context is built.
    """
    leaders: LeaderSet
    table: np.ndarray                     # (h*C(K,t+1) + 1, L); the last row is zero
    unsent: np.ndarray
    label_keys: Sequence[TransmissionKey]

    @property
    def recovered(self) -> Dict[TransmissionKey, np.ndarray]:
        return {self.label_keys[i]: self.table[i] for i in self.unsent.tolist()}


def mn_decoding_context(layout: MnLayout, log: TransmissionLog, demand: DemandVector) -> MnDecodeContext:
    plan = layout.recovery_plan(demand.pattern())
    table = layout.messages.table(log, plan.sent, pad=1)
    if len(plan.unsent):
        # terms only name sent labels, so the order rows are filled in is irrelevant
        table[plan.unsent] = np.bitwise_xor.reduce(table[plan.terms], axis=1)
    return MnDecodeContext(
        leaders=choose_leaders(demand),
        table=table,
        unsent=plan.unsent,
        label_keys=layout.messages.keys,
    )


def mn_decode(
    layout: MnLayout,
    user: int,
    cache: UserCache,
    log: TransmissionLog,
    demand: DemandVector,
    context: MnDecodeContext,
) -> np.ndarray:
    """
    Rebuild file d_u as (F, L) blocks.

    Cached slots are copied; every missing slot (j, S) comes out of Y_{j, S+u}
    once the t cached terms W_{d_i, (j, S+u minus i)} are XORed away.
    """
    files = np.asarray(demand.files, dtype=np.intp)
    return decode_user(layout.plan(user), cache.blocks, files, demand.files[user], context.table)


class MnScheme(CachingScheme):
    """The (K, N, t, h) optimal scheme as a runnable instance."""

    name = "mn"

    def __init__(self, K: int, N: int, t: int, h: int = 1):
        self.layout = MnLayout(K, t, h)
        params, placement = _placement_for(self.layout, N)
        super().__init__(params, placement)
        self.t = t
        self.h = h
        logger.info(f"mn placement: K={K} N={N} t={t} h={h} F={params.F} Z={params.Z}")

    def describe(self) -> str:
        return f"K={self.K} N={self.N} t={self.t} h={self.h}"

    def deliver(self, store_blocks: np.ndarray, demand: DemandVector) -> TransmissionLog:
        self.check_demand(demand)
        return mn_delivery(self.layout, store_blocks, demand, choose_leaders(demand))

    def decoding_context(self, log: TransmissionLog, demand: DemandVector) -> MnDecodeContext:
        return mn_decoding_context(self.layout, log, demand)

    def decode(self, user, cache, log, demand, context) -> np.ndarray:
        return mn_decode(self.layout, user, cache, log, demand, context)

    def decode_all(self, caches: CacheBank, log, demand, context) -> np.ndarray:
        files = np.asarray(demand.files, dtype=np.intp)
        return decode_stacked(self.layout.stacked_plan, caches.stacked, files, context.table)

    def format_transmission(self, tx: Transmission) -> str:
        return f"Y j={tx.replica} A={format_subset(tx.subset)} payload={tx.payload_hex()}"

    def expected_count(self, demand: DemandVector) -> int:
        return transmission_count(self.K, self.t, self.h, demand.e)
