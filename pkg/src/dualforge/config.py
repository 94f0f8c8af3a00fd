"""Resource caps. Every combinatorial explosion is checked against these."""

import os
from dataclasses import dataclass, replace

DEFAULT_SIZE_CAP = 4096
DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class Limits:
    size_cap: int = DEFAULT_SIZE_CAP
    budget: int = DEFAULT_BUDGET
    allow_empty: bool = False

    def with_(self, **kw):
        return replace(self, **kw)


def limits_from_env(env=None):
    """Honour ``DUALFORGE_BUDGET`` (``N`` or ``budget,size_cap``)."""
    env = os.environ if env is None else env
    raw = env.get("DUALFORGE_BUDGET")
    if not raw:
        return Limits()
    parts = [int(p) for p in raw.split(",")]
    if len(parts) == 1:
        return Limits(budget=parts[0])
    return Limits(budget=parts[0], size_cap=parts[1])


LIMITS = limits_from_env()
