"""
Payload engine: caches, delivery, decoding and byte-exact verification.

run() pushes one demand through a scheme over real bytes; sweep_demands()
repeats it over a demand set and keeps the worst measured rate.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from tqdm import tqdm

import config
from src.errors import ConsistencyError, UsageError
from src.schemes.common import CacheBank, TransmissionLog, UserCache
from src.schemes.model import CachingScheme, DemandVector
from src.simulation.demands import exhaustive_demands, random_demands
from src.simulation.store import FileStore


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


@dataclass
class SimulationResult:
    scheme: str
    params: str
    demand: DemandVector
    transmissions_sent: int
    F: int
    rate_measured: Fraction
    decoded: List[bool]
    first_failure: Optional[Tuple[int, int]] = None
    log: Optional[TransmissionLog] = field(default=None, repr=False)

    @property
    def verified(self) -> bool:
        return all(self.decoded)

    @property
    def decoded_count(self) -> int:
        return sum(self.decoded)

    def to_record(self) -> str:
        record = (
            f"scheme={self.scheme} {self.params} demand={self.demand.render()} "
            f"sent={self.transmissions_sent} F={self.F} rate={format_rational(self.rate_measured)} "
            f"decoded={self.decoded_count}/{len(self.decoded)} "
            f"verified={'true' if self.verified else 'false'}"
        )
        if self.first_failure is not None:
            user, slot = self.first_failure
            record += f" first_failure=user:{user + 1},slot:{slot}"
        return record

    def summary(self) -> str:
        lines = [
            f"Scheme:         {self.scheme} ({self.params})",
            f"Demand:         {self.demand.render()} (e={self.demand.e})",
            f"Transmissions:  {self.transmissions_sent} of F={self.F} subfile size",
            f"Rate:           {format_rational(self.rate_measured)} (~{float(self.rate_measured):.4f})",
            f"Decoded users:  {self.decoded_count}/{len(self.decoded)}",
            f"Verified:       {'yes' if self.verified else 'NO'}",
        ]
        if self.first_failure is not None:
            user, slot = self.first_failure
            lines.append(f"First failure:  user {user + 1}, slot {slot}")
        return "\n".join(lines) + "\n"


def materialize_caches(scheme: CachingScheme, store: FileStore) -> CacheBank:
    """Copy each user's slots of every file out of the store (placement phase)."""
    check_store(scheme, store)
    return CacheBank(
        UserCache.materialize(u, slots, store.blocks)
        for u, slots in enumerate(scheme.placement.user_slots)
    )


def check_store(scheme: CachingScheme, store: FileStore) -> None:
    if store.N != scheme.N:
        raise UsageError(f"store holds {store.N} files, scheme expects N={scheme.N}")
    if store.F != scheme.F:
        raise UsageError(f"store is split into {store.F} subfiles, scheme expects F={scheme.F}")


def run(
    scheme: CachingScheme,
    store: FileStore,
    demand: DemandVector,
    caches: Optional[Sequence[UserCache]] = None,
    keep_log: bool = False,
) -> SimulationResult:
    """Deliver one demand, decode every user and compare against the originals."""
    if caches is None:
        caches = materialize_caches(scheme, store)
    elif not isinstance(caches, CacheBank):
        caches = CacheBank(caches)
    log = scheme.deliver(store.blocks, demand)

    expected_count = scheme.expected_count(demand)
    if len(log) != expected_count:
        raise ConsistencyError(
            f"{scheme.name} sent {len(log)} messages for demand {demand.render()}, "
            f"count formula gives {expected_count}"
        )

    context = scheme.decoding_context(log, demand)
    rebuilt = scheme.decode_all(caches, log, demand, context)
    wanted = store.blocks[np.asarray(demand.files, dtype=np.intp)]
    mismatch = rebuilt != wanted
    bad_users = mismatch.any(axis=(1, 2))
    decoded: List[bool] = (~bad_users).tolist()
    first_failure = None
    if bad_users.any():
        user = int(np.argmax(bad_users))
        slot = int(np.argmax(mismatch[user].any(axis=1)))
        first_failure = (user, slot)
        logger.warning(f"user {user + 1} decoded slot {slot} incorrectly")

    result = SimulationResult(
        scheme=scheme.name,
        params=scheme.describe(),
        demand=demand,
        transmissions_sent=len(log),
        F=scheme.F,
        rate_measured=Fraction(len(log), scheme.F),
        decoded=decoded,
        first_failure=first_failure,
        log=log if keep_log else None,
    )
    logger.opt(lazy=True).debug("{}", result.to_record)
    return result


# -----------------------------------------------------------
# Demand sweeps
# -----------------------------------------------------------

@dataclass(frozen=True)
class DemandMode:
    kind: str                 # "exhaustive" | "random"
    count: int = 0
    seed: int = 0

    @classmethod
    def exhaustive(cls) -> "DemandMode":
        return cls("exhaustive")

    @classmethod
    def random(cls, count: Optional[int] = None, seed: int = 0) -> "DemandMode":
        return cls("random", config.RANDOM_DEMAND_COUNT if count is None else count, seed)

    @classmethod
    def auto(cls, K: int, N: int, seed: int = 0) -> "DemandMode":
        """Exhaustive when N^K fits under the cap, else a seeded random sample."""
        if N ** K <= config.EXHAUSTIVE_DEMAND_CAP:
            return cls.exhaustive()
        return cls.random(seed=seed)

    def demands(self, K: int, N: int) -> Iterable[DemandVector]:
        if self.kind == "exhaustive":
            return exhaustive_demands(K, N)
        if self.kind == "random":
            return random_demands(K, N, self.count, self.seed)
        raise UsageError(f"unknown demand mode {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "random":
            return f"random(count={self.count}, seed={self.seed})"
        return self.kind


@dataclass(frozen=True)
class SweepRow:
    demand: DemandVector
    sent: int
    rate: Fraction
    verified: bool

    def to_csv(self) -> str:
        return f"\"{self.demand.render()}\",{self.sent},{format_rational(self.rate)},{str(self.verified).lower()}"


@dataclass
class SweepResult:
    scheme: str
    params: str
    mode: DemandMode
    rows: List[SweepRow]
    worst_rate: Fraction
    worst_demand: DemandVector
    first_failure: Optional[SimulationResult] = None

    @property
    def all_verified(self) -> bool:
        return self.first_failure is None

    @property
    def demand_count(self) -> int:
        return len(self.rows)

    def table(self) -> str:
        lines = ["demand,sent,rate,verified"] + [row.to_csv() for row in self.rows]
        return "\n".join(lines) + "\n"

    def summary_line(self) -> str:
        return (
            f"scheme={self.scheme} {self.params} mode={self.mode.describe()} "
            f"demands={self.demand_count} worst_rate={format_rational(self.worst_rate)} "
            f"worst_demand={self.worst_demand.render()} "
            f"verified={'true' if self.all_verified else 'false'}"
        )


def sweep_demands(
    scheme: CachingScheme,
    store: FileStore,
    mode: DemandMode,
    show_progress: Optional[bool] = None,
) -> SweepResult:
    """Run every demand of the mode; the worst demand is the first reaching the maximum rate."""
    demands = mode.demands(scheme.K, scheme.N)
    caches = materialize_caches(scheme, store)
    show = config.SHOW_PROGRESS if show_progress is None else show_progress

    rows: List[SweepRow] = []
    worst: Optional[SweepRow] = None
    first_failure = None
    for demand in tqdm(demands, desc=f"{scheme.name} demands", disable=not show, leave=False):
        result = run(scheme, store, demand, caches=caches)
        row = SweepRow(demand, result.transmissions_sent, result.rate_measured, result.verified)
        rows.append(row)
        # ties go to the demand with more distinct files
        if worst is None or (row.rate, demand.e) > (worst.rate, worst.demand.e):
            worst = row
        if not result.verified and first_failure is None:
            first_failure = result

    logger.info(
        f"{scheme.name} sweep ({mode.describe()}): {len(rows)} demands, "
        f"worst rate {format_rational(worst.rate)} at {worst.demand.render()}"
    )
    return SweepResult(
        scheme=scheme.name,
        params=scheme.describe(),
        mode=mode,
        rows=rows,
        worst_rate=worst.rate,
        worst_demand=worst.demand,
        first_failure=first_failure,
    )
