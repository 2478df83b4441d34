from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from pilotmesh.model import FileKey


class LinkType(str, Enum):
    BLUETOOTH_D2D = "bluetooth_d2d"
    WIFI = "wifi"
    CELLULAR = "cellular"


class LookupCase(str, Enum):
    CASE0 = "case0"
    """eNodeB-paired direct D2D, no DHT."""
    CASE1 = "case1"
    """Inside the requester's vicinity."""
    CASE2 = "case2"
    """Across WiFi-connected pilots of the same region."""
    CASE3 = "case3"
    """Through the eNodeB, possibly into another region."""


class Outcome(str, Enum):
    FOUND = "found"
    NOT_FOUND = "not_found"


@dataclass(frozen=True, slots=True)
class LookupResult:
    """
    One resolved (or failed) lookup.

    ``links`` lists the request-path edges in order; a not-found result
    carries the full escalation it went through.
    """

    requester: int
    key: FileKey
    outcome: Outcome
    case_used: LookupCase
    links: tuple[LinkType, ...] = ()
    holder: int | None = None
    requester_pilot: int | None = None
    serving_pilot: int | None = None
    via_cache: bool = False

    @property
    def found(self) -> bool:
        return self.outcome is Outcome.FOUND

    @property
    def hops(self) -> int:
        return len(self.links)

    @property
    def local(self) -> bool:
        return self.found and self.holder == self.requester

    @property
    def crossed_pilots(self) -> bool:
        return (
            self.serving_pilot is not None
            and self.requester_pilot is not None
            and self.serving_pilot != self.requester_pilot
        )

    def to_event(self, iteration: int) -> dict[str, Any]:
        return {
            "iter": iteration,
            "requester": self.requester,
            "key": self.key.key,
            "case": self.case_used.value,
            "hops": self.hops,
            "links": [link.value for link in self.links],
            "found": self.found,
        }
