from __future__ import annotations

import math
from enum import Enum
from typing import Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    field_validator,
    model_validator,
)

from pilotmesh.exceptions import PilotMeshValidationError
from pilotmesh.qoe import DEFAULT_PREFERENCE, ParameterId, RatingPolicy


class Mode(str, Enum):
    D2D_ONLY = "d2d_only"
    DHT_D2D = "dht_d2d"


class Strategy(str, Enum):
    RANDOM = "random"
    PMEDIAN = "pmedian"


class RadioConfig(BaseModel):
    """LTE-A radio parameters, kept for the record; the lookup model does not use them."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    single_carriers: PositiveInt = 600
    rb_num: PositiveInt = 100
    total_power_dbw: float = -10.0
    circuit_power_w: float = 0.05
    carrier_ghz: PositiveFloat = 2.15
    tuning_step: PositiveFloat = 20 / (math.pi * 1500**2)
    path_loss_exponent: PositiveFloat = 3.5


class MeasurementPolicy(BaseModel):
    """Scales that turn lookup outcomes into achievement percentages."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    max_hops: PositiveInt = 12
    bluetooth_energy: float = Field(1.0, ge=0)
    wifi_energy: float = Field(2.0, ge=0)
    cellular_energy: float = Field(5.0, ge=0)
    max_energy: PositiveFloat = 20.0
    max_connect_steps: PositiveInt = 6
    max_join_steps: PositiveInt = 8
    n_keywords: PositiveInt = 4096


class SimConfig(BaseModel):
    """
    Experiment configuration.

    Defaults reproduce a single 250 m cell with 100 D2D users and 10
    pilots, 1000 initial files and 500 new files per iteration.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    isd: PositiveFloat = 250.0
    d2d_range: PositiveFloat = 20.0
    n_pilots: PositiveInt = 10
    n_users: PositiveInt = 100
    n_params: int = Field(3, ge=1, le=len(ParameterId))
    """How many top-preference parameters each user rates."""
    initial_files: PositiveInt = 1000
    files_per_iter: PositiveInt = 500
    iterations: PositiveInt = 20
    new_file_fraction: float = Field(1.0, ge=0.0, le=1.0)
    """Probability that a search targets a file added this iteration."""
    mode: Mode = Mode.DHT_D2D
    strategy: Strategy = Strategy.PMEDIAN
    seed: int = 0
    eligible_fraction: float = Field(0.5, gt=0.0, le=1.0)
    max_shared_mb: NonNegativeInt = 500
    p_cap_mb: PositiveFloat | None = 8000.0
    """Pilot serving capacity; ``None`` disables the cap."""
    pilot_data_once: bool = False
    wifi_fraction: float = Field(1.0, ge=0.0, le=1.0)
    id_widths: tuple[PositiveInt, PositiveInt, PositiveInt] = (8, 8, 16)
    preference: tuple[ParameterId, ...] = DEFAULT_PREFERENCE
    measurement: MeasurementPolicy = Field(default_factory=MeasurementPolicy)
    rating: RatingPolicy = Field(default_factory=RatingPolicy)
    radio: RadioConfig = Field(default_factory=RadioConfig)

    @field_validator("preference")
    @classmethod
    def _full_ordering(cls, v: tuple[ParameterId, ...]) -> tuple[ParameterId, ...]:
        if sorted(v) != sorted(ParameterId):
            msg = "preference must order every parameter exactly once"
            raise ValueError(msg)
        return v

    @model_validator(mode="after")
    def _check_counts(self) -> SimConfig:
        if self.n_pilots > self.n_users:
            msg = f"n_pilots={self.n_pilots} exceeds n_users={self.n_users}"
            raise PilotMeshValidationError(msg, pointer="/n_pilots")
        return self

    @property
    def vicinity_radius(self) -> float:
        return self.isd / 10

    @property
    def vicinity_size(self) -> int:
        return math.ceil(1 + (self.n_users - self.n_pilots) / self.n_pilots)

    @property
    def rb_per_user(self) -> float:
        return self.radio.rb_num / self.n_users

    @property
    def n_eligible(self) -> int:
        return min(self.n_users, max(self.n_pilots, round(self.eligible_fraction * self.n_users)))

    @property
    def rated_parameters(self) -> tuple[ParameterId, ...]:
        return self.preference[: self.n_params]

    def with_overrides(self, **overrides: Any) -> SimConfig:  # noqa: ANN401
        """Validated copy with ``None`` overrides ignored."""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return SimConfig.model_validate(data)
