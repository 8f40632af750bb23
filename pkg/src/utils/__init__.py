"""
Utility modules for the caching lab.

Includes:
- combinatorics: exact/log-domain binomials and colex k-subset ranking
"""

from .combinatorics import (
    KSubset,
    binomial,
    enumerate_ksubsets,
    ksubset_rank,
    ksubset_unrank,
    log_binomial,
)

__all__ = [
    'KSubset',
    'binomial',
    'enumerate_ksubsets',
    'ksubset_rank',
    'ksubset_unrank',
    'log_binomial',
]
