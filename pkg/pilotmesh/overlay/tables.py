from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from pilotmesh.model import FileKey, OverlayId


def _add(index: dict[FileKey, set[int]], key: FileKey, device_id: int) -> bool:
    holders = index.setdefault(key, set())
    if device_id in holders:
        return False
    holders.add(device_id)
    return True


def _discard(index: dict[FileKey, set[int]], device_id: int) -> list[FileKey]:
    emptied = []
    for key, holders in list(index.items()):
        holders.discard(device_id)
        if not holders:
            del index[key]
            emptied.append(key)
    return emptied


@dataclass(slots=True)
class MemberEntry:
    overlay_id: OverlayId


@dataclass(slots=True)
class PilotTable:
    """Vicinity state kept by one pilot."""

    pilot_id: OverlayId
    device_id: int
    wifi: bool = True
    members: dict[int, MemberEntry] = field(default_factory=dict)
    stored_keys: dict[FileKey, set[int]] = field(default_factory=dict)
    """Key → members that share it."""
    meta_cache: dict[FileKey, set[int]] = field(default_factory=dict)
    """Key → members that downloaded it through this pilot."""
    next_ms: int = 1

    def remember_store(self, key: FileKey, device_id: int) -> bool:
        return _add(self.stored_keys, key, device_id)

    def remember_download(self, key: FileKey, device_id: int) -> bool:
        return _add(self.meta_cache, key, device_id)

    def forget(self, device_id: int) -> None:
        self.members.pop(device_id, None)
        _discard(self.stored_keys, device_id)
        _discard(self.meta_cache, device_id)

    def holders(self, key: FileKey) -> tuple[set[int], bool]:
        """Holders of ``key`` in this vicinity, cached downloaders first."""
        cached = self.meta_cache.get(key)
        if cached:
            return cached, True
        return self.stored_keys.get(key, set()), False

    def has(self, key: FileKey) -> bool:
        return bool(self.meta_cache.get(key) or self.stored_keys.get(key))


@dataclass(slots=True)
class RegionIndex:
    """Pilot ring and region-level meta-data of one eNodeB."""

    enb: int
    enb_id: OverlayId
    pilots: list[OverlayId] = field(default_factory=list)
    """Sorted by overlay id."""
    pilot_devices: dict[OverlayId, int] = field(default_factory=dict)
    meta_cache: dict[FileKey, set[int]] = field(default_factory=dict)
    """Key → pilot device ids that retrieved it."""
    next_pilot: int = 1
    next_unattached: int = 1

    def join(self, pilot_id: OverlayId, device_id: int) -> None:
        self.pilots.append(pilot_id)
        self.pilots.sort(key=lambda oid: oid.value)
        self.pilot_devices[pilot_id] = device_id

    def part(self, device_id: int) -> None:
        self.pilots = [oid for oid in self.pilots if self.pilot_devices[oid] != device_id]
        self.pilot_devices = {oid: dev for oid, dev in self.pilot_devices.items() if dev != device_id}
        _discard(self.meta_cache, device_id)

    def remember(self, key: FileKey, pilot_device: int) -> bool:
        return _add(self.meta_cache, key, pilot_device)

    def drop(self, key: FileKey, pilot_device: int) -> None:
        holders = self.meta_cache.get(key)
        if holders is None:
            return
        holders.discard(pilot_device)
        if not holders:
            del self.meta_cache[key]

    def ring(self) -> list[int]:
        return [self.pilot_devices[oid] for oid in self.pilots]
