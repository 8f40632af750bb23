"""
Configuration constants for the symmetric caching lab

Centralized defaults for simulation, verification and asymptotic analysis.
Any constant can be overridden from the environment (or a `.env` file at the
project root) by setting SYMCACHE_<NAME>.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

PROJECT_ROOT = Path(__file__).resolve().parent
load_dotenv(PROJECT_ROOT / ".env")  # falls back silently if it doesn't exist


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(f"SYMCACHE_{name}")
    return int(raw) if raw else default


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(f"SYMCACHE_{name}")
    return float(raw) if raw else default


# Simulation defaults
DEFAULT_PAYLOAD_BYTES = _env_int("DEFAULT_PAYLOAD_BYTES", 64)
DEFAULT_SEED = _env_int("DEFAULT_SEED", 0)

# Demand sweeps
# Exhaustive sweeps are allowed only when N**K stays under this cap
EXHAUSTIVE_DEMAND_CAP = _env_int("EXHAUSTIVE_DEMAND_CAP", 50000)
RANDOM_DEMAND_COUNT = _env_int("RANDOM_DEMAND_COUNT", 500)

# Identity checks enumerate user k-subsets only up to this many users
IDENTITY_SUBSET_GUARDRAIL_K = _env_int("IDENTITY_SUBSET_GUARDRAIL_K", 20)

# Asymptotic analysis
TREND_MONOTONE_SLACK = _env_float("TREND_MONOTONE_SLACK", 1e-12)
SANDWICH_SLACK = _env_float("SANDWICH_SLACK", 1e-9)
APPROX_BIN_DELTA = _env_float("APPROX_BIN_DELTA", 0.1)
EXACT_ROW_MAX_N = _env_int("EXACT_ROW_MAX_N", 40)
INNER_BINOMIAL_MAX = _env_int("INNER_BINOMIAL_MAX", 10**4)
MIN_TREND_ROWS = _env_int("MIN_TREND_ROWS", 4)

# Delivery and recovery plans cached per scheme instance
PLAN_CACHE_SIZE = _env_int("PLAN_CACHE_SIZE", 4096)

# Logging
LOG_LEVEL = os.getenv("SYMCACHE_LOG_LEVEL", "INFO")
SHOW_PROGRESS = os.getenv("SYMCACHE_SHOW_PROGRESS", "").lower() in {"1", "true", "yes"}
