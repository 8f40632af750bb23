"""
Scheme description files and the scheme factory.

A description is UTF-8 text with one key=value per line:

    # optimal scheme, three users
    scheme=mn
    K=3
    N=3
    t=1
    h=1
    payload_bytes=64
    seed=0

Grouping instances use n, a, b and N instead. Blank lines and # comments
are ignored.
"""

from fractions import Fraction
from pathlib import Path
from typing import Dict, Literal, Optional

from loguru import logger
from pydantic import BaseModel, Field, ValidationError, model_validator

import config
from src.errors import InfeasibleParametersError, UsageError
from src.schemes.grouping import GroupingScheme
from src.schemes.mn import MnScheme
from src.schemes.model import CachingScheme


class SchemeDescription(BaseModel):
    """One scheme instance plus the simulation knobs that go with it."""

    scheme: Literal["mn", "grouping"]
    K: Optional[int] = Field(default=None, ge=1)
    N: Optional[int] = Field(default=None, ge=1)
    t: Optional[int] = None
    h: int = Field(default=1, ge=1)
    M: Optional[str] = Field(default=None, description="cache size, an integer or p/q")
    n: Optional[int] = Field(default=None, ge=1)
    a: Optional[int] = Field(default=None, ge=0)
    b: Optional[int] = Field(default=None, ge=0)
    payload_bytes: int = Field(default=config.DEFAULT_PAYLOAD_BYTES, ge=1)
    seed: int = Field(default=config.DEFAULT_SEED, ge=0)
    demand: Optional[str] = None

    @model_validator(mode="after")
    def _check_selector(self):
        if self.scheme == "mn":
            missing = ["K"] if self.K is None else []
            if self.N is None and self.K is not None:
                self.N = self.K
            if self.t is None and self.M is None:
                missing.append("t")
            stray = [k for k in ("n", "a", "b") if getattr(self, k) is not None]
        else:
            missing = [k for k in ("n", "a", "b") if getattr(self, k) is None]
            stray = [k for k in ("K", "t", "M") if getattr(self, k) is not None]
            if self.h != 1:
                stray.append("h")
        if missing:
            raise ValueError(f"scheme={self.scheme} needs {', '.join(missing)}")
        if stray:
            raise ValueError(f"scheme={self.scheme} does not take {', '.join(stray)}")
        return self

    def resolved_t(self) -> int:
        """t from the explicit flag, or from t = K*M/N when only M is given."""
        if self.M is None:
            return self.t
        try:
            M = Fraction(self.M)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"cache size M must be a rational number, got {self.M!r}") from None
        t = self.K * M / self.N
        if t.denominator != 1:
            raise InfeasibleParametersError(
                f"t = K*M/N not integral (K={self.K}, M={M}, N={self.N}, K*M/N={t})"
            )
        if self.t is not None and self.t != t:
            raise InfeasibleParametersError(f"t={self.t} disagrees with K*M/N={t}")
        return int(t)


def parse_description_text(text: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"description line {number} is not key=value: {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise UsageError(f"description key {key!r} given twice (line {number})")
        values[key] = value
    return values


def load_description(path: Path, overrides: Optional[Dict[str, object]] = None) -> SchemeDescription:
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"scheme description not found: {path}")
    values: Dict[str, object] = dict(parse_description_text(path.read_text(encoding="utf-8")))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    logger.debug(f"loaded scheme description from {path}: {sorted(values)}")
    return validate_description(values)


def validate_description(values: Dict[str, object]) -> SchemeDescription:
    try:
        return SchemeDescription.model_validate(values)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'description'}: {err['msg']}"
            for err in exc.errors()
        )
        raise UsageError(problems) from None


def build_scheme(desc: SchemeDescription) -> CachingScheme:
    if desc.scheme == "mn":
        t = desc.resolved_t()
        if t < 0 or t > desc.K:
            raise InfeasibleParametersError(f"t={t} outside [0, K={desc.K}]")
        return MnScheme(desc.K, desc.N, t, desc.h)
    return GroupingScheme(desc.n, desc.a, desc.b, desc.N)
