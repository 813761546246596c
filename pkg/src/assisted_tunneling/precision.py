"""Working-precision tiers for the mpmath-backed evaluations."""

import enum
from contextlib import contextmanager

import mpmath as mp


class Tier(str, enum.Enum):
    STANDARD = "standard"
    EXTENDED = "extended"

    @property
    def dps(self) -> int:
        return 15 if self is Tier.STANDARD else 60

    @property
    def bits(self) -> int:
        # standard is IEEE double: 53-bit mantissa
        return 53 if self is Tier.STANDARD else mp.libmp.dps_to_prec(60)


def as_tier(tier) -> Tier:
    if isinstance(tier, Tier):
        return tier
    try:
        return Tier(str(tier).lower())
    except ValueError:
        raise ValueError(f"unknown precision tier {tier!r}; expected 'standard' or 'extended'") from None


@contextmanager
def working(tier):
    """Run the enclosed block at the precision of ``tier``."""
    with mp.workprec(as_tier(tier).bits):
        yield
