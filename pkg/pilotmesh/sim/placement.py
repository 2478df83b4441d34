from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from pilotmesh.exceptions import PilotMeshValidationError
from pilotmesh.solver import SolverLimits, solve

from .config import Strategy

if TYPE_CHECKING:
    import numpy as np

    from pilotmesh.model import Topology
    from pilotmesh.solver import Instance, SolveReport

logger = logging.getLogger("pilotmesh.sim")


@dataclass(frozen=True, slots=True)
class Placement:
    """Chosen pilots and the pilot every device attaches to."""

    pilots: tuple[int, ...]
    attachment: dict[int, int]
    strategy: Strategy
    loads: dict[int, float] = field(default_factory=dict)
    """MB each pilot serves to its attached members."""
    report: SolveReport | None = None

    @property
    def max_load(self) -> float:
        return max(self.loads.values(), default=0.0)


def _nearest_pilot(topology: Topology, device_id: int, pilots: tuple[int, ...]) -> int:
    position = topology.device(device_id).position
    return min(pilots, key=lambda p: (position.squared_distance(topology.device(p).position), p))


def _finish(
    topology: Topology,
    pilots: tuple[int, ...],
    chosen: dict[int, int],
    strategy: Strategy,
    report: SolveReport | None,
) -> Placement:
    attachment: dict[int, int] = {}
    for device in sorted(topology.devices, key=lambda d: d.device_id):
        dev = device.device_id
        if dev in pilots:
            attachment[dev] = dev
        elif dev in chosen:
            attachment[dev] = chosen[dev]
        else:
            attachment[dev] = _nearest_pilot(topology, dev, pilots)
    loads = dict.fromkeys(pilots, 0.0)
    for dev, pilot in attachment.items():
        if dev != pilot:
            loads[pilot] += topology.device(dev).shared_mb
    return Placement(pilots, attachment, strategy, loads, report)


def place_pilots(
    topology: Topology,
    instance: Instance,
    strategy: Strategy,
    rng: np.random.Generator,
    limits: SolverLimits | None = None,
) -> Placement:
    """
    Select pilots and attach every device.

    ``random`` draws ``P`` eligible devices uniformly and attaches members
    to the nearest pilot. ``pmedian`` opens the solver's pilots and keeps
    its assignment. Pilots always head their own vicinity.

    Raises:
        InfeasibleInstanceError: propagated from the solver.
    """
    if instance.pilot_ids is None:
        msg = "Placement needs an instance built from a topology (pilot_ids missing)"
        raise PilotMeshValidationError(msg)
    member_ids = instance.member_ids or list(range(instance.m))

    if strategy is Strategy.RANDOM:
        picked = rng.choice(instance.pilot_ids, size=instance.p, replace=False)
        pilots = tuple(sorted(int(p) for p in picked))
        placement = _finish(topology, pilots, {}, strategy, None)
    else:
        report = solve(instance, limits)
        pilots = tuple(sorted(instance.pilot_ids[j] for j in report.open_pilots))
        pilot_of = report.assignment.pilot_of
        chosen = {member_ids[i]: instance.pilot_ids[int(j)] for i, j in enumerate(pilot_of) if j >= 0}
        placement = _finish(topology, pilots, chosen, strategy, report)

    logger.info(
        "[RESULT] %s placement: pilots %s, max load %.1f MB",
        strategy.value, list(placement.pilots), placement.max_load,
    )
    return placement
