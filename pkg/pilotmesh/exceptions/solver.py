from typing import Any

from .base import PilotMeshError


class InfeasibleInstanceError(PilotMeshError):
    """
    Raised when no capacity-feasible assignment can exist.

    Example:
        >>> raise InfeasibleInstanceError(total_demand=3000.0, capacity=2000.0)
    """

    def __init__(
        self,
        message: str | None = None,
        *,
        total_demand: float | None = None,
        capacity: float | None = None,
        **kwargs: Any,  # noqa: ANN401
    ) -> None:
        details = kwargs.pop("details", None) or {}
        if total_demand is not None:
            details["total_demand"] = total_demand
        if capacity is not None:
            details["capacity"] = capacity
        super().__init__(
            message=message or "Instance is infeasible",
            details=details,
            **kwargs,
        )


class OracleGuardError(PilotMeshError):
    """Raised when an instance is too large for exhaustive enumeration."""

    def __init__(self, *, m: int, e: int, max_m: int, max_e: int) -> None:
        super().__init__(
            message=(
                f"Instance too large for the exact oracle "
                f"(m={m}, e={e}; limits m<={max_m}, e<={max_e})"
            ),
            details={"m": m, "e": e},
        )
