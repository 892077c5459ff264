"""Run-time limits, overridable through environment variables."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_PREFIX = "PLIABLE_"


@dataclass(frozen=True)
class Config:
    # largest k accepted by construct_family
    k_cap: int = 6
    # construction aborts once the family would exceed this many sets
    family_member_budget: int = 50_000
    # largest k for which the full realizability LP is materialized
    lp_max_k: int = 3
    # submodularity rows allowed in one LP
    lp_row_budget: int = 200_000
    lp_pivot_budget: int = 200_000
    partition_node_budget: int = 5_000_000

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"config {f.name} must be a positive integer, got {value!r}")
        if self.k_cap > 10:
            raise ValueError("k_cap above 10 is not supported (ground set of 1024+ elements)")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "Config":
        """Defaults, then ``PLIABLE_<FIELD>`` variables, then explicit overrides."""
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                try:
                    values[f.name] = int(raw)
                except ValueError:
                    raise ValueError(f"{ENV_PREFIX}{f.name.upper()}={raw!r} is not an integer") from None
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_(self, **changes) -> "Config":
        return replace(self, **changes)


DEFAULT = Config()
