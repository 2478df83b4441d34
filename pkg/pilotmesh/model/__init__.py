from .geometry import ORIGIN, Position, d2d_hops, in_vicinity
from .ids import (
    DEFAULT_WIDTHS,
    FileKey,
    IdWidths,
    OverlayId,
    blake2b_hasher,
    decode_id,
    encode_id,
    file_key,
    prefix_distance,
)
from .scenario import ArtifactMeta, ScenarioDevice, ScenarioFile
from .topology import Device, Role, Topology

__all__ = (
    "DEFAULT_WIDTHS",
    "ORIGIN",
    "ArtifactMeta",
    "Device",
    "FileKey",
    "IdWidths",
    "OverlayId",
    "Position",
    "Role",
    "ScenarioDevice",
    "ScenarioFile",
    "Topology",
    "blake2b_hasher",
    "d2d_hops",
    "decode_id",
    "encode_id",
    "file_key",
    "in_vicinity",
    "prefix_distance",
)
