from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import TYPE_CHECKING, Annotated

from annotated_doc import Doc

from pilotmesh.exceptions import PilotMeshValidationError, SegmentOverflowError

if TYPE_CHECKING:
    from collections.abc import Callable


@dataclass(frozen=True, slots=True)
class IdWidths:
    """Bit widths of the eNodeB, pilot and member segments of an overlay id."""

    enb: int = 8
    pilot: int = 8
    ms: int = 16

    def __post_init__(self) -> None:
        for name, width in (("enb", self.enb), ("pilot", self.pilot), ("ms", self.ms)):
            if width < 1:
                msg = f"Segment '{name}' width must be at least 1 bit, got {width}"
                raise PilotMeshValidationError(msg)

    @property
    def total(self) -> int:
        return self.enb + self.pilot + self.ms

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.enb, self.pilot, self.ms)


DEFAULT_WIDTHS = IdWidths()


@dataclass(frozen=True, slots=True)
class OverlayId:
    """m-bit composite identifier: eNodeB bits | pilot bits | member bits."""

    value: int
    widths: IdWidths = DEFAULT_WIDTHS

    def __post_init__(self) -> None:
        if not 0 <= self.value < (1 << self.widths.total):
            msg = f"Overlay id {self.value} outside [0, 2^{self.widths.total})"
            raise PilotMeshValidationError(msg)

    @property
    def width(self) -> int:
        return self.widths.total

    @property
    def enb(self) -> int:
        return decode_id(self)[0]

    @property
    def pilot(self) -> int:
        return decode_id(self)[1]

    @property
    def ms(self) -> int:
        return decode_id(self)[2]

    def __str__(self) -> str:
        enb, pilot, ms = decode_id(self)
        return f"{enb}.{pilot}.{ms}"


@dataclass(frozen=True, slots=True)
class FileKey:
    """A shared-file key in the same m-bit space as overlay ids."""

    key: int
    width: int = DEFAULT_WIDTHS.total

    def __post_init__(self) -> None:
        if not 0 <= self.key < (1 << self.width):
            msg = f"File key {self.key} outside [0, 2^{self.width})"
            raise PilotMeshValidationError(msg)

    @property
    def value(self) -> int:
        return self.key


def encode_id(
    enb: int,
    pilot: int,
    ms: int,
    widths: Annotated[
        IdWidths,
        Doc(
            """
            Segment widths ``(b, p, h)``.

            Defaults to ``(8, 8, 16)``, a 32-bit id space.
            """
        ),
    ] = DEFAULT_WIDTHS,
) -> OverlayId:
    """
    Concatenate three segment values into one overlay id.

    Raises:
        SegmentOverflowError: a segment value does not fit its width.
    """
    for name, value, width in (
        ("enb", enb, widths.enb),
        ("pilot", pilot, widths.pilot),
        ("ms", ms, widths.ms),
    ):
        if not 0 <= value < (1 << width):
            raise SegmentOverflowError(name, value, width)
    return OverlayId((enb << (widths.pilot + widths.ms)) | (pilot << widths.ms) | ms, widths)


def decode_id(overlay_id: OverlayId) -> tuple[int, int, int]:
    widths = overlay_id.widths
    value = overlay_id.value
    ms = value & ((1 << widths.ms) - 1)
    pilot = (value >> widths.ms) & ((1 << widths.pilot) - 1)
    enb = value >> (widths.pilot + widths.ms)
    return enb, pilot, ms


def prefix_distance(a: OverlayId | FileKey, b: OverlayId | FileKey) -> int:
    """
    Bits remaining after the common most-significant prefix.

    Zero iff both values are equal, at most the id width.

    Raises:
        PilotMeshValidationError: the two ids live in spaces of different width.
    """
    if a.width != b.width:
        msg = f"Cannot compare ids of width {a.width} and {b.width}"
        raise PilotMeshValidationError(msg, details={"left": a.width, "right": b.width})
    return (a.value ^ b.value).bit_length()


def blake2b_hasher(data: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(data, digest_size=16).digest(), "big")


def file_key(
    name: str | bytes,
    width: int = DEFAULT_WIDTHS.total,
    hasher: Annotated[
        Callable[[bytes], int] | None,
        Doc(
            """
            Hash hook mapping file content or name to an integer.

            The result is reduced modulo ``2^width``. Defaults to a
            128-bit BLAKE2b digest.
            """
        ),
    ] = None,
) -> FileKey:
    data = name.encode() if isinstance(name, str) else name
    digest = (hasher or blake2b_hasher)(data)
    return FileKey(digest % (1 << width), width)
