from .overlay import Membership, Overlay
from .result import LinkType, LookupCase, LookupResult, Outcome
from .tables import MemberEntry, PilotTable, RegionIndex

__all__ = (
    "LinkType",
    "LookupCase",
    "LookupResult",
    "MemberEntry",
    "Membership",
    "Outcome",
    "Overlay",
    "PilotTable",
    "RegionIndex",
)
