from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PrivateAttr,
    field_validator,
    model_validator,
)

from pilotmesh.exceptions import PilotMeshValidationError

CAPACITY_TOLERANCE = 1e-9


class Instance(BaseModel):
    """
    A capacitated P-median pilot-placement problem.

    Rows of ``dist`` are members, columns are eligible pilots. A pilot
    that is also a member appears in both, with a zero distance to
    itself. ``P_cap`` of ``None`` (or infinity) means uncapacitated.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    demands: list[NonNegativeFloat] = Field(min_length=1)
    """Shared data d_i per member, MB."""

    pilot_data: list[NonNegativeFloat] = Field(min_length=1)
    """Own data d_j per eligible pilot, MB."""

    dist: list[list[NonNegativeFloat]]
    """Distance h_ij in meters, one row per member."""

    p: int = Field(alias="P", ge=1)
    """Number of pilots to open."""

    p_cap: float | None = Field(default=None, alias="P_cap", gt=0)
    """Data serving capacity per pilot, MB."""

    member_ids: list[int] | None = None
    """Device ids of the rows, when built from a topology."""

    pilot_ids: list[int] | None = None
    """Device ids of the columns, ascending."""

    _d: np.ndarray = PrivateAttr()
    _dj: np.ndarray = PrivateAttr()
    _h: np.ndarray = PrivateAttr()

    @field_validator("p_cap", mode="before")
    @classmethod
    def _infinite_means_uncapacitated(cls, v: Any) -> Any:  # noqa: ANN401
        if isinstance(v, (int, float)) and math.isinf(v) and v > 0:
            return None
        return v

    @model_validator(mode="after")
    def _check_dimensions(self) -> Instance:
        m, e = len(self.demands), len(self.pilot_data)
        if len(self.dist) != m:
            msg = f"dist has {len(self.dist)} rows, expected {m} (one per member)"
            raise PilotMeshValidationError(msg, pointer="/dist")
        for i, row in enumerate(self.dist):
            if len(row) != e:
                msg = f"dist row {i} has {len(row)} entries, expected {e}"
                raise PilotMeshValidationError(msg, pointer=f"/dist/{i}")
        if self.p > e:
            msg = f"P={self.p} exceeds the {e} eligible pilots"
            raise PilotMeshValidationError(msg, pointer="/P")
        for name, ids, size in (("member_ids", self.member_ids, m), ("pilot_ids", self.pilot_ids, e)):
            if ids is not None and len(ids) != size:
                msg = f"{name} has {len(ids)} entries, expected {size}"
                raise PilotMeshValidationError(msg, pointer=f"/{name}")
        return self

    def model_post_init(self, __context: Any) -> None:  # noqa: ANN401
        self._d = np.asarray(self.demands, dtype=np.float64)
        self._dj = np.asarray(self.pilot_data, dtype=np.float64)
        self._h = np.asarray(self.dist, dtype=np.float64).reshape(len(self.demands), len(self.pilot_data))
        for arr in (self._d, self._dj, self._h):
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.demands)

    @property
    def e(self) -> int:
        return len(self.pilot_data)

    @property
    def d(self) -> np.ndarray:
        return self._d

    @property
    def dj(self) -> np.ndarray:
        return self._dj

    @property
    def h(self) -> np.ndarray:
        return self._h

    @property
    def capacitated(self) -> bool:
        return self.p_cap is not None

    @property
    def capacity(self) -> float:
        return math.inf if self.p_cap is None else self.p_cap

    @property
    def total_demand(self) -> float:
        return float(self._d.sum())

    def pilot_label(self, j: int) -> int:
        return self.pilot_ids[j] if self.pilot_ids is not None else j


@dataclass(frozen=True, slots=True, eq=False)
class Assignment:
    """
    Decision variables: ``open`` is Z (one flag per eligible pilot),
    ``assign`` is Y (members × pilots).

    ``violations`` lists pilots flagged over capacity by repair.
    """

    open: np.ndarray
    assign: np.ndarray
    violations: tuple[int, ...] = ()

    @classmethod
    def empty(cls, m: int, e: int) -> Assignment:
        return cls(np.zeros(e, dtype=bool), np.zeros((m, e), dtype=bool))

    @classmethod
    def from_vector(cls, pilot_of: list[int] | np.ndarray, open_pilots: list[int] | np.ndarray, e: int) -> Assignment:
        """Build from a member → pilot column vector (``-1`` for unassigned)."""
        pilot_of = np.asarray(pilot_of, dtype=np.int64)
        z = np.zeros(e, dtype=bool)
        z[np.asarray(open_pilots, dtype=np.int64)] = True
        y = np.zeros((pilot_of.size, e), dtype=bool)
        rows = np.flatnonzero(pilot_of >= 0)
        y[rows, pilot_of[rows]] = True
        return cls(z, y)

    @property
    def open_pilots(self) -> tuple[int, ...]:
        return tuple(int(j) for j in np.flatnonzero(self.open))

    @property
    def pilot_of(self) -> np.ndarray:
        """Assigned column per member, ``-1`` when unassigned or multiply assigned."""
        counts = self.assign.sum(axis=1)
        return np.where(counts == 1, self.assign.argmax(axis=1), -1)

    def members_of(self, j: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.assign[:, j]))

    def is_single_assignment(self) -> bool:
        """One open pilot per member, no member on a closed pilot."""
        if not np.all(self.assign.sum(axis=1) == 1):
            return False
        return not np.any(self.assign & ~self.open[np.newaxis, :])


def check_dimensions(inst: Instance, a: Assignment) -> None:
    if a.open.shape != (inst.e,) or a.assign.shape != (inst.m, inst.e):
        msg = (
            f"Assignment shape Z{a.open.shape} Y{a.assign.shape} does not match "
            f"instance m={inst.m}, e={inst.e}"
        )
        raise PilotMeshValidationError(msg)


def capacity_load(inst: Instance, a: Assignment, *, pilot_data_once: bool = False) -> np.ndarray:
    """
    Capacity-side load per pilot.

    Literal form: Σ_i (d_i + d_j)·Y_ij, which counts the pilot's own data
    once per assigned member. With ``pilot_data_once``: Σ_i d_i·Y_ij + d_j·Z_j.
    """
    y = a.assign.astype(np.float64)
    served = inst.d @ y
    if pilot_data_once:
        return served + inst.dj * a.open
    return served + inst.dj * y.sum(axis=0)


def served_loads(inst: Instance, a: Assignment) -> np.ndarray:
    """MB each pilot serves to its members."""
    return inst.d @ a.assign.astype(np.float64)


def capacity_violations(inst: Instance, a: Assignment, *, pilot_data_once: bool = False) -> tuple[int, ...]:
    if not inst.capacitated:
        return ()
    load = capacity_load(inst, a, pilot_data_once=pilot_data_once)
    over = (load > inst.capacity + CAPACITY_TOLERANCE) & a.open
    return tuple(int(j) for j in np.flatnonzero(over))


def assign_nearest(inst: Instance, open_mask: np.ndarray) -> Assignment:
    """Each member to its nearest open pilot, lowest column on ties."""
    cols = np.flatnonzero(open_mask)
    nearest = cols[np.argmin(inst.h[:, cols], axis=1)]
    return Assignment.from_vector(nearest, cols, inst.e)
