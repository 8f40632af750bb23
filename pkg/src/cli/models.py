from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

import config

SCHEME_KEYS = ("scheme", "K", "N", "t", "h", "M", "n", "a", "b", "payload_bytes", "seed", "demand")


class CliConfig(BaseModel):
    """
    One parsed invocation.

    Scheme flags are kept loose here and checked against the selector when
    the scheme description is built.
    """

    command: Literal["simulate", "verify", "sweep", "analyze", "pack", "unpack"] = Field(
        ...,
        description="Subcommand to run.",
    )
    scheme: Optional[Literal["mn", "grouping"]] = None
    K: Optional[int] = None
    N: Optional[int] = None
    t: Optional[int] = None
    h: Optional[int] = None
    M: Optional[str] = None
    n: Optional[int] = None
    a: Optional[int] = None
    b: Optional[int] = None
    demand: Optional[str] = None
    payload_bytes: Optional[int] = None
    seed: Optional[int] = None
    config_path: Optional[Path] = Field(None, description="Scheme description file (--config).")
    out: Optional[Path] = Field(None, description="Write the main output here instead of stdout.")
    transcript: Optional[Path] = Field(None, description="Write the transmission transcript here.")
    format: Literal["human", "csv", "transcript"] = "human"
    mode: Literal["auto", "exhaustive", "random"] = "auto"
    count: Optional[int] = Field(None, ge=1)
    inputs: List[Path] = Field(default_factory=list)
    epsilon: Optional[float] = None
    n_values: Optional[str] = None
    n_range: Optional[str] = None
    F: Optional[int] = None
    manifest: Optional[Path] = None
    directory: Optional[Path] = None

    def scheme_overrides(self) -> Dict[str, Any]:
        """Flags that feed the scheme description, unset ones dropped."""
        values = {key: getattr(self, key) for key in SCHEME_KEYS}
        return {k: v for k, v in values.items() if v is not None}

    def resolved_seed(self, fallback: Optional[int] = None) -> int:
        if self.seed is not None:
            return self.seed
        return config.DEFAULT_SEED if fallback is None else fallback
