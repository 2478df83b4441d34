"""
Two-tier DHT over D2D links.

Members talk to their pilot over Bluetooth/D2D, pilots of one region
talk to each other over WiFi, and everything else goes through the
eNodeB over cellular links. A lookup escalates through those tiers in
that order and stops at the first tier that knows a holder.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Annotated

from annotated_doc import Doc

from pilotmesh.exceptions import OverlayError
from pilotmesh.model import (
    DEFAULT_WIDTHS,
    Device,
    FileKey,
    IdWidths,
    OverlayId,
    Position,
    Topology,
    encode_id,
    in_vicinity,
    prefix_distance,
)

from .result import LinkType, LookupCase, LookupResult, Outcome
from .tables import MemberEntry, PilotTable, RegionIndex

if TYPE_CHECKING:
    from collections.abc import Iterable

logger = logging.getLogger("pilotmesh.overlay")

BT = LinkType.BLUETOOTH_D2D
WIFI = LinkType.WIFI
CELL = LinkType.CELLULAR


@dataclass(slots=True)
class Membership:
    overlay_id: OverlayId
    enb: int
    position: Position
    pilot: int | None = None
    """Pilot device id; ``None`` while unattached."""


class Overlay:
    """
    Pilot tables, region indexes and the lookup ladder.

    All mutation (``register``, ``attach``, ``store``, ``cache_update``,
    ``leave``) assumes a single writer.
    """

    def __init__(self, widths: IdWidths = DEFAULT_WIDTHS) -> None:
        self.widths = widths
        self.regions: dict[int, RegionIndex] = {}
        self.pilots: dict[int, PilotTable] = {}
        self._members: dict[int, Membership] = {}
        self._files: dict[int, set[FileKey]] = {}
        self._holders: dict[FileKey, set[int]] = {}

    # -- membership ---------------------------------------------------------

    def add_region(self, enb: int) -> RegionIndex:
        region = self.regions.get(enb)
        if region is None:
            region = RegionIndex(enb=enb, enb_id=encode_id(enb, 0, 0, self.widths))
            self.regions[enb] = region
        return region

    def add_pilot(self, device: Device, enb: int = 1) -> OverlayId:
        """Promote ``device`` to pilot of ``enb``; returns its overlay id."""
        if device.device_id in self.pilots:
            return self.pilots[device.device_id].pilot_id
        if not device.pilot_eligible:
            msg = f"Device {device.device_id} is not pilot eligible"
            raise OverlayError(msg)
        previous = self._members.get(device.device_id)
        if previous is not None:
            self._detach(device.device_id)

        region = self.add_region(enb)
        pilot_id = encode_id(enb, region.next_pilot, 0, self.widths)
        region.next_pilot += 1
        table = PilotTable(pilot_id=pilot_id, device_id=device.device_id, wifi=device.wifi)
        table.members[device.device_id] = MemberEntry(pilot_id)
        self.pilots[device.device_id] = table
        region.join(pilot_id, device.device_id)
        self._members[device.device_id] = Membership(pilot_id, enb, device.position, device.device_id)
        for key in self._files.get(device.device_id, ()):
            table.remember_store(key, device.device_id)
        logger.debug("Pilot %d joined region %d as %s", device.device_id, enb, pilot_id)
        return pilot_id

    def register(self, device: Device, topology: Topology, enb: int = 1) -> OverlayId:
        """
        Registration request of a device.

        Pilots join the region ring. Members attach to the nearest pilot
        whose D2D disc covers them (lowest device id on ties) or stay
        unattached, in which case only eNodeB-paired D2D is possible.
        """
        if device.device_id not in topology:
            msg = f"Device {device.device_id} is not part of the topology"
            raise OverlayError(msg)
        if device.is_pilot or device.device_id in topology.pilots:
            return self.add_pilot(device, enb)

        covering = [
            table
            for table in self.pilots.values()
            if table.pilot_id.enb == enb
            and in_vicinity(device.position, self._members[table.device_id].position, topology.d2d_range)
        ]
        if not covering:
            return self._place(device.device_id, device.position, enb, None)
        nearest = min(
            covering,
            key=lambda t: (device.position.squared_distance(self._members[t.device_id].position), t.device_id),
        )
        return self._place(device.device_id, device.position, enb, nearest.device_id)

    def attach(self, device_id: int, position: Position, pilot: int | None, enb: int = 1) -> OverlayId:
        """Attach a member to an explicitly chosen pilot (``None`` for unattached)."""
        if device_id in self.pilots:
            return self.pilots[device_id].pilot_id
        if pilot is not None and pilot not in self.pilots:
            msg = f"Device {pilot} is not a pilot"
            raise OverlayError(msg)
        return self._place(device_id, position, enb, pilot)

    def _place(self, device_id: int, position: Position, enb: int, pilot: int | None) -> OverlayId:
        if device_id in self._members:
            self._detach(device_id)
        region = self.add_region(enb)
        if pilot is None:
            overlay_id = encode_id(enb, 0, region.next_unattached, self.widths)
            region.next_unattached += 1
        else:
            table = self.pilots[pilot]
            overlay_id = encode_id(enb, table.pilot_id.pilot, table.next_ms, self.widths)
            table.next_ms += 1
            table.members[device_id] = MemberEntry(overlay_id)
            for key in self._files.get(device_id, ()):
                table.remember_store(key, device_id)
        self._members[device_id] = Membership(overlay_id, enb, position, pilot)
        return overlay_id

    def _detach(self, device_id: int) -> None:
        membership = self._members.pop(device_id)
        if membership.pilot is not None and membership.pilot != device_id:
            table = self.pilots[membership.pilot]
            keys = set(table.stored_keys) | set(table.meta_cache)
            table.forget(device_id)
            self._sync_region(membership.enb, table, keys)

    def membership(self, device_id: int) -> Membership:
        try:
            return self._members[device_id]
        except KeyError:
            msg = f"Device {device_id} is not registered"
            raise OverlayError(msg) from None

    def is_registered(self, device_id: int) -> bool:
        return device_id in self._members

    def pilot_of(self, device_id: int) -> int | None:
        return self.membership(device_id).pilot

    def vicinity(self, pilot: int) -> tuple[int, ...]:
        return tuple(sorted(self.pilots[pilot].members))

    # -- files --------------------------------------------------------------

    def store(self, device_id: int, key: FileKey) -> None:
        """Record that ``device_id`` shares ``key``."""
        membership = self.membership(device_id)
        self._files.setdefault(device_id, set()).add(key)
        self._holders.setdefault(key, set()).add(device_id)
        if membership.pilot is not None:
            self.pilots[membership.pilot].remember_store(key, device_id)

    def holds(self, device_id: int, key: FileKey) -> bool:
        return key in self._files.get(device_id, ())

    # -- lookup -------------------------------------------------------------

    def _nearest_prefix(self, key: FileKey, candidates: Iterable[int]) -> int:
        return min(candidates, key=lambda dev: (prefix_distance(self._members[dev].overlay_id, key), dev))

    def _vicinity_holder(self, table: PilotTable, key: FileKey) -> tuple[int, bool] | None:
        holders, cached = table.holders(key)
        valid = [dev for dev in holders if self.holds(dev, key)]
        if not valid and cached:
            holders, cached = table.stored_keys.get(key, set()), False
            valid = [dev for dev in holders if self.holds(dev, key)]
        if not valid:
            return None
        return self._nearest_prefix(key, valid), cached

    def _holder_at(self, pilot: int, key: FileKey) -> int:
        hit = self._vicinity_holder(self.pilots[pilot], key)
        if hit is None:
            msg = f"Pilot {pilot} has no holder of key {key.key}"
            raise OverlayError(msg)
        return hit[0]

    @staticmethod
    def _edge(a: int, b: int, link: LinkType) -> tuple[LinkType, ...]:
        return () if a == b else (link,)

    def _pilot_candidates(self, region: RegionIndex, key: FileKey, allowed: set[int]) -> tuple[list[int], bool]:
        def serves(dev: int) -> bool:
            return dev in allowed and self._vicinity_holder(self.pilots[dev], key) is not None

        cached = sorted(dev for dev in region.meta_cache.get(key, ()) if serves(dev))
        if cached:
            return cached, True
        return [dev for dev in region.ring() if serves(dev)], False

    def lookup(
        self,
        requester: Annotated[int, Doc("Device id of the registered device asking for the file.")],
        key: Annotated[FileKey, Doc("Key of the requested file in the overlay id space.")],
    ) -> LookupResult:
        """
        Resolve ``key`` for ``requester`` through the tier ladder.

        Case 1 asks the requester's pilot, case 2 the WiFi-connected pilots
        of the region, case 3 the eNodeB, which may forward to other
        regions in order of prefix distance. Each tier consults its
        meta-data cache before the stored keys and picks the nearest
        prefix match. Unattached requesters fall back to case 0.
        """
        membership = self.membership(requester)
        if self.holds(requester, key):
            return LookupResult(requester, key, Outcome.FOUND, LookupCase.CASE1, (), requester, membership.pilot, membership.pilot)
        pilot = membership.pilot
        if pilot is None:
            return self.direct_lookup(requester, key)

        table = self.pilots[pilot]
        up = self._edge(requester, pilot, BT)

        hit = self._vicinity_holder(table, key)
        if hit is not None:
            holder, cached = hit
            links = up + self._edge(pilot, holder, BT)
            return self._found(requester, key, LookupCase.CASE1, links, holder, pilot, pilot, cached)

        region = self.regions[membership.enb]
        escalation: tuple[LinkType, ...] = up
        wifi_peers = {dev for dev in region.ring() if dev != pilot and self.pilots[dev].wifi}
        if table.wifi and wifi_peers:
            candidates, cached = self._pilot_candidates(region, key, wifi_peers)
            if candidates:
                target = self._nearest_prefix(key, candidates)
                holder = self._holder_at(target, key)
                fetch = self._edge(target, holder, BT)
                links = up + (WIFI,) + fetch + fetch
                return self._found(requester, key, LookupCase.CASE2, links, holder, pilot, target, cached)
            escalation += (WIFI,)

        climb = up + (CELL,)
        escalation += (CELL,)
        for enb in self._region_order(membership.enb, key):
            other = self.regions[enb]
            hop = () if enb == membership.enb else (CELL,)
            if enb != membership.enb:
                escalation += (CELL,)
            allowed = {
                dev
                for dev in other.ring()
                if dev != pilot and not (enb == membership.enb and table.wifi and self.pilots[dev].wifi)
            }
            candidates, cached = self._pilot_candidates(other, key, allowed)
            if candidates:
                target = self._nearest_prefix(key, candidates)
                holder = self._holder_at(target, key)
                links = climb + hop + (CELL,) + self._edge(target, holder, BT)
                return self._found(requester, key, LookupCase.CASE3, links, holder, pilot, target, cached)
            loose = [dev for dev in self._holders.get(key, ()) if self._members[dev].enb == enb and self._members[dev].pilot is None]
            if loose:
                holder = self._nearest_prefix(key, loose)
                links = climb + hop + (CELL,)
                return self._found(requester, key, LookupCase.CASE3, links, holder, pilot, None, False)

        logger.debug("Lookup of %d by %d not found", key.key, requester)
        return LookupResult(requester, key, Outcome.NOT_FOUND, LookupCase.CASE3, escalation, None, pilot, None)

    def _region_order(self, home: int, key: FileKey) -> list[int]:
        others = sorted(
            (enb for enb in self.regions if enb != home),
            key=lambda enb: (prefix_distance(self.regions[enb].enb_id, key), enb),
        )
        return [home, *others]

    def _found(
        self,
        requester: int,
        key: FileKey,
        case: LookupCase,
        links: tuple[LinkType, ...],
        holder: int,
        requester_pilot: int | None,
        serving_pilot: int | None,
        cached: bool,  # noqa: FBT001
    ) -> LookupResult:
        logger.debug("Lookup of %d by %d resolved at %s in %d hops", key.key, requester, case.value, len(links))
        return LookupResult(requester, key, Outcome.FOUND, case, links, holder, requester_pilot, serving_pilot, cached)

    def direct_lookup(self, requester: int, key: FileKey) -> LookupResult:
        """
        eNodeB-paired D2D without the DHT.

        The requester signals the eNodeB, which pages the physically
        nearest holder in any region; both signalling edges are cellular.
        """
        membership = self.membership(requester)
        if self.holds(requester, key):
            return LookupResult(requester, key, Outcome.FOUND, LookupCase.CASE0, (), requester, membership.pilot)
        holders = self._holders.get(key)
        if not holders:
            return LookupResult(requester, key, Outcome.NOT_FOUND, LookupCase.CASE0, (CELL,), None, membership.pilot)
        holder = min(holders, key=lambda dev: (membership.position.squared_distance(self._members[dev].position), dev))
        return LookupResult(requester, key, Outcome.FOUND, LookupCase.CASE0, (CELL, CELL), holder, membership.pilot)

    # -- meta-data ----------------------------------------------------------

    def cache_update(self, completed: LookupResult) -> None:
        """
        Record a completed lookup.

        The requester keeps a replica and its pilot caches it as a
        downloader. When the lookup crossed pilots, the serving pilot
        caches its holder and the region index records both pilots.
        Repeating an update changes nothing.
        """
        if not completed.found:
            msg = "Only successful lookups can update caches"
            raise OverlayError(msg)
        key = completed.key
        requester = completed.requester
        self.store(requester, key)

        pilot = self._members[requester].pilot
        if pilot is None:
            return
        self.pilots[pilot].remember_download(key, requester)

        serving = completed.serving_pilot
        if serving is not None and serving != pilot and serving in self.pilots and completed.holder is not None:
            self.pilots[serving].remember_download(key, completed.holder)
            for dev in (pilot, serving):
                self.regions[self._members[dev].enb].remember(key, dev)

    def leave(self, device_id: int) -> None:
        """Remove a device and purge every cache entry that names it; unknown ids are ignored."""
        membership = self._members.get(device_id)
        if membership is None:
            return
        for key in self._files.pop(device_id, set()):
            holders = self._holders.get(key)
            if holders is not None:
                holders.discard(device_id)
                if not holders:
                    del self._holders[key]

        if device_id in self.pilots:
            table = self.pilots.pop(device_id)
            self.regions[membership.enb].part(device_id)
            del self._members[device_id]
            for member in sorted(table.members):
                if member != device_id:
                    entry = self._members.pop(member)
                    self._place(member, entry.position, entry.enb, None)
            return

        self._detach(device_id)

    def _sync_region(self, enb: int, table: PilotTable, keys: set[FileKey]) -> None:
        region = self.regions[enb]
        for key in keys:
            if not table.has(key):
                region.drop(key, table.device_id)
