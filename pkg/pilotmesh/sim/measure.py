"""
Achievement percentages of the satisfaction parameters.

Each lookup is scored on every parameter in [0, 100]:

1. internet-free access: found without a cellular link
2. chunk access time: fewer overlay hops is better, up to ``max_hops``
3. energy: weighted link count, up to ``max_energy``
4. rank search: resolved locally or inside the vicinity
5. keyword search: a file with the same keyword is in the vicinity
6. target hop distance: D2D relay hops to the holder
7. connect time: overlay hops plus one pairing step
8. pilot hop distance: D2D relay hops to the pilot
9. join time: relay hops to the pilot plus pilot and eNodeB updates
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from pilotmesh.exceptions import PilotMeshValidationError
from pilotmesh.overlay import LinkType, LookupCase, LookupResult
from pilotmesh.qoe import ParameterId

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .config import MeasurementPolicy

JOIN_SIGNALLING_STEPS = 2


@dataclass(frozen=True, slots=True)
class LookupSample:
    result: LookupResult
    target_hops: int
    """D2D relay hops between requester and holder, 0 when local."""
    pilot_hops: int | None
    """D2D relay hops to the associated pilot; ``None`` without one."""
    keyword_nearby: bool


def _scaled(value: float, limit: float) -> float:
    return 100.0 * (1.0 - min(value, limit) / limit)


def _inverse(hops: int) -> float:
    return 100.0 if hops <= 1 else 100.0 / hops


def energy_units(result: LookupResult, policy: MeasurementPolicy) -> float:
    weights = {
        LinkType.BLUETOOTH_D2D: policy.bluetooth_energy,
        LinkType.WIFI: policy.wifi_energy,
        LinkType.CELLULAR: policy.cellular_energy,
    }
    return sum(weights[link] for link in result.links)


def sample_percentages(sample: LookupSample, policy: MeasurementPolicy) -> dict[ParameterId, float]:
    result = sample.result
    found = result.found
    pct: dict[ParameterId, float] = {}

    pct[ParameterId.INTERNET_FREE_ACCESS] = 100.0 if found and LinkType.CELLULAR not in result.links else 0.0
    pct[ParameterId.CHUNK_ACCESS_TIME] = _scaled(result.hops, policy.max_hops) if found else 0.0
    pct[ParameterId.ENERGY_CONSUMPTION] = _scaled(energy_units(result, policy), policy.max_energy) if found else 0.0
    in_vicinity = result.local or result.case_used is LookupCase.CASE1
    pct[ParameterId.RANK_SEARCH] = 100.0 if found and in_vicinity else 0.0
    pct[ParameterId.KEYWORD_SEARCH] = 100.0 if sample.keyword_nearby else 0.0
    pct[ParameterId.TARGET_HOP_DISTANCE] = _inverse(sample.target_hops) if found else 0.0

    connect_steps = 0 if result.local else result.hops + 1
    pct[ParameterId.CONNECT_TIME] = _scaled(connect_steps, policy.max_connect_steps) if found else 0.0

    if sample.pilot_hops is None:
        pct[ParameterId.PILOT_HOP_DISTANCE] = 0.0
        join_steps = JOIN_SIGNALLING_STEPS
    else:
        pct[ParameterId.PILOT_HOP_DISTANCE] = _inverse(sample.pilot_hops)
        join_steps = sample.pilot_hops + JOIN_SIGNALLING_STEPS
    pct[ParameterId.JOIN_TIME] = _scaled(join_steps, policy.max_join_steps)
    return pct


def parameter_percentages(ledger: Sequence[LookupSample], policy: MeasurementPolicy) -> dict[ParameterId, float]:
    """
    Mean percentage per parameter over one iteration's lookups.

    Raises:
        PilotMeshValidationError: empty ledger.
    """
    if not ledger:
        msg = "Cannot measure an empty ledger"
        raise PilotMeshValidationError(msg)
    totals = dict.fromkeys(ParameterId, 0.0)
    for sample in ledger:
        for param, value in sample_percentages(sample, policy).items():
            totals[param] += value
    return {param: total / len(ledger) for param, total in totals.items()}
