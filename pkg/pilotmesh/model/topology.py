from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from pilotmesh.exceptions import PilotMeshValidationError

from .geometry import Position  # noqa: TC001
from .ids import DEFAULT_WIDTHS, IdWidths


class Role(str, Enum):
    MEMBER = "member"
    PILOT = "pilot"


@dataclass(frozen=True, slots=True)
class Device:
    """A mobile station in the cell."""

    device_id: int
    position: Position
    shared_mb: int = 0
    pilot_eligible: bool = False
    role: Role = Role.MEMBER
    wifi: bool = True
    """WiFi uplink, only meaningful for pilots."""

    def __post_init__(self) -> None:
        if self.shared_mb < 0:
            msg = f"Device {self.device_id} shares negative data ({self.shared_mb} MB)"
            raise PilotMeshValidationError(msg)
        if self.role is Role.PILOT and not self.pilot_eligible:
            msg = f"Device {self.device_id} is not pilot eligible"
            raise PilotMeshValidationError(msg)

    @property
    def is_pilot(self) -> bool:
        return self.role is Role.PILOT


@dataclass(frozen=True, slots=True)
class Topology:
    """Devices under one cell with their current pilot selection."""

    isd: float
    d2d_range: float
    devices: tuple[Device, ...]
    pilots: tuple[int, ...] = ()
    widths: IdWidths = DEFAULT_WIDTHS
    _index: dict[int, Device] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.isd <= 0 or self.d2d_range <= 0:
            msg = f"isd and d2d_range must be positive, got {self.isd}, {self.d2d_range}"
            raise PilotMeshValidationError(msg)
        index = {d.device_id: d for d in self.devices}
        if len(index) != len(self.devices):
            msg = "Device ids must be unique"
            raise PilotMeshValidationError(msg)
        for pilot_id in self.pilots:
            device = index.get(pilot_id)
            if device is None or not device.pilot_eligible:
                msg = f"Pilot {pilot_id} does not refer to a pilot-eligible device"
                raise PilotMeshValidationError(msg)
        object.__setattr__(self, "_index", index)

    def device(self, device_id: int) -> Device:
        try:
            return self._index[device_id]
        except KeyError:
            msg = f"Unknown device {device_id}"
            raise PilotMeshValidationError(msg) from None

    def __contains__(self, device_id: object) -> bool:
        return device_id in self._index

    @property
    def eligible(self) -> tuple[Device, ...]:
        return tuple(d for d in self.devices if d.pilot_eligible)

    def with_pilots(self, pilot_ids: tuple[int, ...] | list[int]) -> Topology:
        """Return a copy whose roles reflect ``pilot_ids``."""
        chosen = set(pilot_ids)
        devices = tuple(
            replace(d, role=Role.PILOT if d.device_id in chosen else Role.MEMBER)
            for d in self.devices
        )
        return Topology(
            isd=self.isd,
            d2d_range=self.d2d_range,
            devices=devices,
            pilots=tuple(sorted(chosen)),
            widths=self.widths,
        )
