"""
Combinatorial primitives

Exact and log-domain binomial coefficients, plus k-subset enumeration and
colexicographic rank/unrank. Subsets are sorted tuples over [0, n); callers
render them 1-based when they leave the library.
"""

import math
from typing import Iterator, Sequence, Tuple

import numpy as np

from src.errors import DomainError, OutOfRangeError

KSubset = Tuple[int, ...]

# Above this, differences of lgamma values lose too many digits; the
# Stirling difference form is accurate to O(k/n^2) there.
_LGAMMA_SAFE_N = 10**6


def binomial(n: int, k: int) -> int:
    """Exact C(n, k); 0 when k > n."""
    if n < 0 or k < 0:
        raise DomainError(f"binomial needs non-negative arguments, got ({n}, {k})")
    return math.comb(n, k)


def log_binomial(n: int, k: int) -> float:
    """Natural log of C(n, k) via log-gamma."""
    if n < 0 or k < 0:
        raise DomainError(f"log_binomial needs non-negative arguments, got ({n}, {k})")
    if k > n:
        raise DomainError(f"log_binomial undefined for k > n ({k} > {n})")
    if k == 0 or k == n:
        return 0.0
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def log_binomial_big(n: int, k: int) -> float:
    """
    Natural log of C(n, k) for an arbitrary-precision upper argument.

    Used when n itself is a huge binomial (e.g. F* = C(C(n,a), C(n-b,a))) and
    cannot be converted to a float. Writes x = k/n and uses

        log C(n,k) = k log n - n*S(x) - 0.5*log1p(-x) - lgamma(k+1)

    where S(x) = sum_{j>=2} x^j / (j(j-1)) = (1-x)log(1-x) + x.
    """
    if n < 0 or k < 0:
        raise DomainError(f"log_binomial_big needs non-negative arguments, got ({n}, {k})")
    if k > n:
        raise DomainError(f"log_binomial_big undefined for k > n ({k} > {n})")
    k = min(k, n - k)
    if k == 0:
        return 0.0
    if n < _LGAMMA_SAFE_N:
        return log_binomial(n, k)

    x = k / n  # int / int stays exact-rounded for big ints
    if x < 1e-4:
        # series keeps precision where (1-x)log(1-x) + x would cancel
        series = 0.0
        term = x
        for j in range(2, 12):
            term *= x
            series += term / (j * (j - 1))
        n_times_series = float(k) * series / x if x > 0 else 0.0
    else:
        n_times_series = float(k) * ((1 - x) * math.log1p(-x) + x) / x
    return k * math.log(n) - n_times_series - 0.5 * math.log1p(-x) - math.lgamma(k + 1)


def log_falling_ratio(g: int, f: int) -> float:
    """
    log of g(g-1)...(g-f+1) / g^f, i.e. log of C(g,f) * f! / g^f.

    Evaluated as a sum of log1p terms so the result is never positive.
    """
    if f < 0 or g < 0:
        raise DomainError(f"log_falling_ratio needs non-negative arguments, got ({g}, {f})")
    if f == 0:
        return 0.0
    if f > g:
        return float("-inf")
    steps = np.arange(f, dtype=np.float64) / float(g)
    return float(np.sum(np.log1p(-steps)))


def _check_ksubset(s: Sequence[int], n: int) -> KSubset:
    subset = tuple(int(x) for x in s)
    for prev, cur in zip(subset, subset[1:]):
        if cur <= prev:
            raise DomainError(f"k-subset must be strictly increasing: {subset}")
    if subset and (subset[0] < 0 or subset[-1] >= n):
        raise DomainError(f"k-subset {subset} has elements outside [0, {n})")
    return subset


def ksubset_rank(s: Sequence[int], n: int) -> int:
    """Colex rank of the k-subset s of [0, n)."""
    subset = _check_ksubset(s, n)
    return sum(math.comb(c, i + 1) for i, c in enumerate(subset))


def ksubset_unrank(r: int, n: int, k: int) -> KSubset:
    """The k-subset of [0, n) with colex rank r."""
    total = binomial(n, k)
    if r < 0 or r >= total:
        raise OutOfRangeError(f"rank {r} outside [0, C({n},{k})={total})")
    out = [0] * k
    while k > 0:
        # Binary search for the largest m with C(m, k) <= r
        lower, upper = k - 1, n - 1
        while lower < upper:
            mid = (lower + upper + 1) // 2
            if math.comb(mid, k) <= r:
                lower = mid
            else:
                upper = mid - 1
        r -= math.comb(lower, k)
        k -= 1
        out[k] = lower
        n = lower
    return tuple(out)


def enumerate_ksubsets(n: int, k: int) -> Iterator[KSubset]:
    """
    All k-subsets of [0, n) in colex order.

    Walks the k-bit masks below 2^n in increasing order (Gosper's hack);
    increasing mask order is exactly colex order.
    """
    if k < 0 or n < 0:
        raise DomainError(f"enumerate_ksubsets needs non-negative arguments, got ({n}, {k})")
    if k > n:
        return
    if k == 0:
        yield ()
        return
    limit = 1 << n
    mask = (1 << k) - 1
    while mask < limit:
        yield mask_to_subset(mask)
        low = mask & -mask
        ripple = mask + low
        mask = (((ripple ^ mask) >> 2) // low) | ripple


def mask_to_subset(mask: int) -> KSubset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subset_to_mask(s: Sequence[int]) -> int:
    mask = 0
    for x in s:
        mask |= 1 << x
    return mask


def format_subset(s: Sequence[int]) -> str:
    """Render a subset with 1-based labels, comma separated."""
    return ",".join(str(x + 1) for x in s)
