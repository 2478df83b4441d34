from __future__ import annotations

import math
from dataclasses import dataclass

from pilotmesh.exceptions import PilotMeshValidationError


@dataclass(frozen=True, slots=True)
class Position:
    """Planar position in meters, eNodeB at the origin."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            msg = f"Position must be finite, got ({self.x}, {self.y})"
            raise PilotMeshValidationError(msg)

    def squared_distance(self, other: Position) -> float:
        dx = self.x - other.x
        dy = self.y - other.y
        return dx * dx + dy * dy

    def distance(self, other: Position) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def in_cell(self, isd: float) -> bool:
        return self.x * self.x + self.y * self.y <= isd * isd


ORIGIN = Position(0.0, 0.0)


def in_vicinity(member: Position, pilot: Position, r: float) -> bool:
    """Disc membership test: squared distance at most ``r²``, boundary included."""
    if r <= 0:
        msg = f"D2D range must be positive, got {r}"
        raise PilotMeshValidationError(msg)
    return member.squared_distance(pilot) <= r * r


def d2d_hops(a: Position, b: Position, r: float) -> int:
    """Relay hops needed to bridge ``a`` and ``b`` with range ``r``; 0 when co-located."""
    distance = a.distance(b)
    if distance == 0:
        return 0
    return max(1, math.ceil(distance / r))
