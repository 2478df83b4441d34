from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from pilotmesh.exceptions import PilotMeshValidationError

from .geometry import Position
from .ids import IdWidths
from .topology import Device, Role, Topology


class ArtifactMeta(BaseModel):
    """Version and provenance header carried by generated files."""

    model_config = ConfigDict(extra="allow")

    tool: str = "pilotmesh"
    version: str | None = None
    seed: int | list[int] | None = None
    config: dict[str, Any] = Field(default_factory=dict)
    """Full configuration the artifact was produced with."""


class ScenarioDevice(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    id: int = Field(ge=0)
    x: float
    y: float
    shared_mb: int = Field(ge=0)
    pilot_eligible: bool = False
    wifi: bool = True


class ScenarioFile(BaseModel):
    """
    On-disk scenario: one cell, its devices and id layout.

    Lengths are meters, data sizes MB. ``meta.config`` holds the
    generating configuration so downstream commands can rebuild the
    P-median instance from the scenario alone.
    """

    model_config = ConfigDict(extra="forbid")

    meta: ArtifactMeta | None = None
    isd: float = Field(gt=0)
    d2d_range: float = Field(gt=0)
    id_widths: tuple[int, int, int] = (8, 8, 16)
    devices: list[ScenarioDevice] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_devices(self) -> ScenarioFile:
        seen: set[int] = set()
        limit = self.isd * self.isd
        for i, device in enumerate(self.devices):
            if device.id in seen:
                msg = f"Duplicate device id {device.id}"
                raise PilotMeshValidationError(msg, pointer=f"/devices/{i}/id")
            seen.add(device.id)
            if device.x * device.x + device.y * device.y > limit:
                msg = f"Device {device.id} lies outside the cell of radius {self.isd}"
                raise PilotMeshValidationError(msg, pointer=f"/devices/{i}")
        return self

    def to_topology(self) -> Topology:
        devices = tuple(
            Device(
                device_id=d.id,
                position=Position(d.x, d.y),
                shared_mb=d.shared_mb,
                pilot_eligible=d.pilot_eligible,
                wifi=d.wifi,
            )
            for d in self.devices
        )
        return Topology(
            isd=self.isd,
            d2d_range=self.d2d_range,
            devices=devices,
            widths=IdWidths(*self.id_widths),
        )

    @classmethod
    def from_topology(cls, topology: Topology, meta: ArtifactMeta | None = None) -> ScenarioFile:
        return cls(
            meta=meta,
            isd=topology.isd,
            d2d_range=topology.d2d_range,
            id_widths=topology.widths.as_tuple(),
            devices=[
                ScenarioDevice(
                    id=d.device_id,
                    x=d.position.x,
                    y=d.position.y,
                    shared_mb=d.shared_mb,
                    pilot_eligible=d.pilot_eligible or d.role is Role.PILOT,
                    wifi=d.wifi,
                )
                for d in topology.devices
            ],
        )
