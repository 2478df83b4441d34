"""Exhaustive verification oracle for small instances."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Annotated

import numpy as np
from annotated_doc import Doc

from pilotmesh.exceptions import InfeasibleInstanceError, OracleGuardError

from .instance import CAPACITY_TOLERANCE, Assignment, Instance, assign_nearest

logger = logging.getLogger("pilotmesh.solver")

MAX_ORACLE_MEMBERS = 14
MAX_ORACLE_PILOTS = 12


@dataclass(frozen=True, slots=True, eq=False)
class OracleResult:
    assignment: Assignment
    objective: float
    subsets_checked: int

    @property
    def open_pilots(self) -> tuple[int, ...]:
        return self.assignment.open_pilots


def _best_capacitated(
    inst: Instance,
    cols: tuple[int, ...],
    incumbent: float,
    *,
    pilot_data_once: bool,
) -> tuple[float, list[int] | None]:
    """Branch and bound over member→pilot choices within one open subset."""
    h = inst.h[:, cols]
    d = inst.d
    cost = d[:, np.newaxis] * h
    if pilot_data_once:
        increments = np.repeat(d[:, np.newaxis], len(cols), axis=1)
        start_load = inst.dj[list(cols)].copy()
    else:
        increments = d[:, np.newaxis] + inst.dj[np.newaxis, list(cols)]
        start_load = np.zeros(len(cols))

    cap = inst.capacity + CAPACITY_TOLERANCE
    if np.any(start_load > cap):
        return incumbent, None

    order = sorted(range(inst.m), key=lambda i: (-d[i], i))
    floor = cost.min(axis=1)
    remaining = np.zeros(inst.m + 1)
    for depth in range(inst.m - 1, -1, -1):
        remaining[depth] = remaining[depth + 1] + floor[order[depth]]
    choice_order = [sorted(range(len(cols)), key=lambda k, i=i: (cost[i, k], k)) for i in range(inst.m)]

    best = incumbent
    best_pick: list[int] | None = None
    pick = [-1] * inst.m
    load = start_load

    def descend(depth: int, acc: float) -> None:
        nonlocal best, best_pick
        if acc + remaining[depth] >= best - 1e-12:
            return
        if depth == inst.m:
            best = acc
            best_pick = pick.copy()
            return
        i = order[depth]
        for k in choice_order[i]:
            if load[k] + increments[i, k] > cap:
                continue
            load[k] += increments[i, k]
            pick[i] = cols[k]
            descend(depth + 1, acc + cost[i, k])
            load[k] -= increments[i, k]
        pick[i] = -1

    descend(0, 0.0)
    return best, best_pick


def brute_force_oracle(
    inst: Instance,
    *,
    pilot_data_once: Annotated[
        bool,
        Doc("Charge each open pilot's own data once instead of once per attached member."),
    ] = False,
    max_members: Annotated[
        int,
        Doc("Largest member count the enumeration accepts."),
    ] = MAX_ORACLE_MEMBERS,
    max_pilots: Annotated[
        int,
        Doc("Largest number of eligible pilots the enumeration accepts."),
    ] = MAX_ORACLE_PILOTS,
) -> OracleResult:
    """
    Exact optimum by enumerating every P-subset of eligible pilots.

    Uncapacitated subsets assign each member to its nearest open pilot;
    capacitated ones search assignments exhaustively with a lower-bound
    prune. Subsets are visited in lexicographic order and only a strictly
    better objective replaces the incumbent.

    Raises:
        OracleGuardError: more than ``max_members`` members or ``max_pilots`` pilots.
        InfeasibleInstanceError: no subset admits a capacity-feasible assignment.
    """
    if inst.m > max_members or inst.e > max_pilots:
        raise OracleGuardError(m=inst.m, e=inst.e, max_m=max_members, max_e=max_pilots)

    best = math.inf
    best_assignment: Assignment | None = None
    checked = 0

    for cols in itertools.combinations(range(inst.e), inst.p):
        checked += 1
        if not inst.capacitated:
            candidate = assign_nearest(inst, _mask(inst.e, cols))
            value = float(np.sum(inst.d * inst.h[np.arange(inst.m), candidate.pilot_of]))
            if value < best - 1e-12:
                best, best_assignment = value, candidate
            continue
        value, pick = _best_capacitated(inst, cols, best, pilot_data_once=pilot_data_once)
        if pick is not None:
            best = value
            best_assignment = Assignment.from_vector(pick, list(cols), inst.e)

    if best_assignment is None:
        msg = "No capacity-feasible assignment exists for any pilot subset"
        raise InfeasibleInstanceError(msg, total_demand=inst.total_demand, capacity=inst.capacity)

    logger.debug("Oracle checked %d subsets, optimum %.4f", checked, best)
    return OracleResult(best_assignment, best, checked)


def _mask(e: int, cols: tuple[int, ...]) -> np.ndarray:
    z = np.zeros(e, dtype=bool)
    z[list(cols)] = True
    return z
