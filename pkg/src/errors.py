"""
Exception hierarchy for the caching lab.

Every error carries a stable `reason` code so the CLI can report failures as a
single machine-parseable line.
"""


class CachingError(Exception):
    """Base class for all library errors."""

    reason = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def one_line(self) -> str:
        detail = " ".join(self.message.split())
        return f"error reason={self.reason} detail={detail}"


class DomainError(CachingError, ValueError):
    reason = "domain_error"


class InfeasibleParametersError(CachingError, ValueError):
    reason = "infeasible_parameters"


class OutOfRangeError(CachingError, IndexError):
    reason = "out_of_range"


class UsageError(CachingError, ValueError):
    reason = "usage_error"


class GuardrailError(CachingError, ValueError):
    reason = "guardrail"


class InsufficientRangeError(CachingError, ValueError):
    """Raised by trend tables that have too few feasible rows.

    The rows that were evaluated travel with the error so callers can still
    report them.
    """

    reason = "insufficient_range"

    def __init__(self, message: str, rows=None):
        super().__init__(message)
        self.rows = list(rows or [])


class ConsistencyError(CachingError, RuntimeError):
    reason = "consistency_fault"


class DecodeMismatchError(CachingError, RuntimeError):
    reason = "decode_mismatch"

    def __init__(self, message: str, user: int, slot: int):
        super().__init__(message)
        self.user = user
        self.slot = slot


class CheckFailedError(CachingError, RuntimeError):
    """A verification check or trend verdict did not pass."""

    reason = "check_failed"
