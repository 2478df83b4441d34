from .base import PilotMeshError
from .overlay import OverlayError
from .solver import InfeasibleInstanceError, OracleGuardError
from .validator import PilotMeshValidationError, SegmentOverflowError

__all__ = (
    "InfeasibleInstanceError",
    "OracleGuardError",
    "OverlayError",
    "PilotMeshError",
    "PilotMeshValidationError",
    "SegmentOverflowError",
)
