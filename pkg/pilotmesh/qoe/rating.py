from __future__ import annotations

from enum import IntEnum

from pydantic import BaseModel, ConfigDict, model_validator

from pilotmesh.exceptions import PilotMeshValidationError


class Rating(IntEnum):
    """Absolute category rating recentered on zero."""

    BAD = -2
    POOR = -1
    SATISFACTORY = 0
    GOOD = 1
    EXCELLENT = 2


class RatingPolicy(BaseModel):
    """
    Piecewise-constant map from achievement percentage to rating.

    ``pct > excellent`` → 2, ``> good`` → 1, ``> satisfactory`` → 0,
    ``≥ poor`` → −1, below that −2. The lowest boundary is closed so the
    map stays total: exactly 20% rates −1 with the defaults.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    excellent: float = 80.0
    good: float = 60.0
    satisfactory: float = 40.0
    poor: float = 20.0

    @model_validator(mode="after")
    def _check_order(self) -> RatingPolicy:
        cuts = (self.excellent, self.good, self.satisfactory, self.poor)
        if any(hi <= lo for hi, lo in zip(cuts, cuts[1:])):
            msg = f"Rating thresholds must be strictly decreasing, got {cuts}"
            raise PilotMeshValidationError(msg)
        if not (0 <= self.poor and self.excellent <= 100):
            msg = f"Rating thresholds must lie in [0, 100], got {cuts}"
            raise PilotMeshValidationError(msg)
        return self

    def rate(self, pct: float) -> Rating:
        if pct > self.excellent:
            return Rating.EXCELLENT
        if pct > self.good:
            return Rating.GOOD
        if pct > self.satisfactory:
            return Rating.SATISFACTORY
        if pct >= self.poor:
            return Rating.POOR
        return Rating.BAD


DEFAULT_POLICY = RatingPolicy()


def rate_percentage(pct: float, policy: RatingPolicy = DEFAULT_POLICY) -> Rating:
    """
    Raises:
        PilotMeshValidationError: ``pct`` outside [0, 100].
    """
    if not 0 <= pct <= 100:
        msg = f"Percentage must lie in [0, 100], got {pct}"
        raise PilotMeshValidationError(msg)
    return policy.rate(pct)
