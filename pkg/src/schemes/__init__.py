"""
Caching schemes package

The symmetric-scheme contract with its structural checks, the optimal
(K, N, t, h) scheme and the grouping scheme.
"""

from .grouping import GroupingScheme, grouping_rate_vs_optimal, verify_lower1
from .mn import MnScheme, choose_leaders, mn_placement
from .model import (
    CachingScheme,
    DemandVector,
    PlacementProfile,
    SchemeParams,
    divisibility_check,
    optimal_rate,
    optimal_subpacketization,
    validate_symmetric,
)

__all__ = [
    "CachingScheme",
    "DemandVector",
    "GroupingScheme",
    "MnScheme",
    "PlacementProfile",
    "SchemeParams",
    "choose_leaders",
    "divisibility_check",
    "grouping_rate_vs_optimal",
    "mn_placement",
    "optimal_rate",
    "optimal_subpacketization",
    "validate_symmetric",
    "verify_lower1",
]
