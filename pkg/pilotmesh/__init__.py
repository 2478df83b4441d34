from .__meta__ import __version__
from .exceptions import (
    InfeasibleInstanceError,
    OracleGuardError,
    OverlayError,
    PilotMeshError,
    PilotMeshValidationError,
    SegmentOverflowError,
)
from .model import FileKey, OverlayId, Position, ScenarioFile, Topology, file_key
from .overlay import LookupCase, LookupResult, Overlay
from .qoe import RatingPolicy, SatisfactionReport, rate_percentage, us_overall
from .sim import RunMetrics, SimConfig, generate_scenario, place_pilots, run
from .solver import Instance, SolveReport, SolverLimits, brute_force_oracle, solve

__all__ = (
    "FileKey",
    "InfeasibleInstanceError",
    "Instance",
    "LookupCase",
    "LookupResult",
    "OracleGuardError",
    "Overlay",
    "OverlayError",
    "OverlayId",
    "PilotMeshError",
    "PilotMeshValidationError",
    "Position",
    "RatingPolicy",
    "RunMetrics",
    "SatisfactionReport",
    "ScenarioFile",
    "SegmentOverflowError",
    "SimConfig",
    "SolveReport",
    "SolverLimits",
    "Topology",
    "__version__",
    "brute_force_oracle",
    "file_key",
    "generate_scenario",
    "place_pilots",
    "rate_percentage",
    "run",
    "solve",
    "us_overall",
)
