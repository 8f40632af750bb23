"""
Demand vectors: parsing, the canonical ones and sweep iterators.
"""

import itertools
from typing import Iterator, Optional

import config
from src.errors import DomainError, UsageError
from src.schemes.model import DemandVector
from src.simulation.prng import SplitMix64


def parse_demand(text: str, K: int, N: int) -> DemandVector:
    """Comma-separated 0-based file indices, one per user."""
    try:
        files = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"demand must be comma-separated integers, got {text!r}") from None
    if len(files) != K:
        raise UsageError(f"demand lists {len(files)} users, expected K={K}")
    for u, f in enumerate(files):
        if not 0 <= f < N:
            raise UsageError(f"user {u + 1} requests file {f}, outside [0, N={N})")
    return DemandVector(files=files, N=N)


def distinct_demand(K: int, N: int) -> DemandVector:
    """Files 0..min(K,N)-1, wrapping around when K > N; e = min(K, N)."""
    return DemandVector(files=tuple(u % N for u in range(K)), N=N)


def uniform_demand(K: int, N: int) -> DemandVector:
    return DemandVector(files=(0,) * K, N=N)


def random_demand(K: int, N: int, rng: SplitMix64) -> DemandVector:
    return DemandVector(files=tuple(rng.below(N) for _ in range(K)), N=N)


def named_demand(mode: str, K: int, N: int, seed: int = 0) -> DemandVector:
    if mode == "distinct":
        return distinct_demand(K, N)
    if mode == "uniform":
        return uniform_demand(K, N)
    if mode == "random":
        return random_demand(K, N, SplitMix64(seed))
    return parse_demand(mode, K, N)


def exhaustive_demands(K: int, N: int, cap: Optional[int] = None) -> Iterator[DemandVector]:
    """Every vector in [N]^K, lexicographic; refused when N^K exceeds the cap."""
    cap = config.EXHAUSTIVE_DEMAND_CAP if cap is None else cap
    if N ** K > cap:
        raise UsageError(
            f"exhaustive sweep over N^K = {N}^{K} = {N ** K} demands exceeds the cap of {cap}; "
            f"use random mode"
        )
    return (DemandVector(files=files, N=N) for files in itertools.product(range(N), repeat=K))


def random_demands(K: int, N: int, count: int, seed: int) -> Iterator[DemandVector]:
    if count < 1:
        raise DomainError(f"random sweep needs a positive count, got {count}")
    rng = SplitMix64(seed)
    for _ in range(count):
        yield random_demand(K, N, rng)
