from __future__ import annotations

import logging

import numpy as np

from pilotmesh.exceptions import PilotMeshValidationError

from .instance import (
    CAPACITY_TOLERANCE,
    Assignment,
    Instance,
    capacity_load,
    capacity_violations,
    check_dimensions,
)

logger = logging.getLogger("pilotmesh.solver")


def _increment(inst: Instance, i: int, j: int, *, pilot_data_once: bool) -> float:
    if pilot_data_once:
        return float(inst.d[i])
    return float(inst.d[i] + inst.dj[j])


def repair_feasibility(
    inst: Instance,
    relaxed: Assignment,
    *,
    pilot_data_once: bool = False,
) -> Assignment:
    """
    Turn a relaxed assignment into one pilot per member.

    1. A member on several open pilots keeps the one with the smallest d_i·h_ij.
    2. Over-capacity pilots shed members, most expensive first.
    3. Unassigned members, cheapest d_i·h_nearest first, go to the nearest
       open pilot with residual capacity, or to the nearest open pilot
       with a violation flag when none has room.

    An assignment that is already feasible is returned as is.
    """
    check_dimensions(inst, relaxed)
    open_mask = relaxed.open
    n_open = int(open_mask.sum())
    if n_open != inst.p:
        msg = f"Repair needs exactly P={inst.p} open pilots, got {n_open}"
        raise PilotMeshValidationError(msg)

    if relaxed.is_single_assignment() and not capacity_violations(inst, relaxed, pilot_data_once=pilot_data_once):
        return relaxed

    cost = inst.d[:, np.newaxis] * inst.h
    y = relaxed.assign & open_mask[np.newaxis, :]
    open_cols = np.flatnonzero(open_mask)

    for i in np.flatnonzero(y.sum(axis=1) > 1):
        keep = int(np.argmin(np.where(y[i], cost[i], np.inf)))
        y[i] = False
        y[i, keep] = True

    cap = inst.capacity
    load = capacity_load(inst, Assignment(open_mask, y), pilot_data_once=pilot_data_once)

    if inst.capacitated:
        for j in open_cols:
            if load[j] <= cap + CAPACITY_TOLERANCE:
                continue
            members = np.flatnonzero(y[:, j])
            order = sorted(members, key=lambda i, j=j: (-cost[i, j], -i))
            for i in order:
                if load[j] <= cap + CAPACITY_TOLERANCE:
                    break
                y[i, j] = False
                load[j] -= _increment(inst, int(i), int(j), pilot_data_once=pilot_data_once)

    unassigned = np.flatnonzero(~y.any(axis=1))
    if not inst.capacitated:
        targets = open_cols[np.argmin(inst.h[np.ix_(unassigned, open_cols)], axis=1)]
        y[unassigned, targets] = True
        return Assignment(open_mask.copy(), y)

    nearest_cost = cost[:, open_cols].min(axis=1)
    for i in sorted(unassigned, key=lambda i: (nearest_cost[i], i)):
        by_distance = sorted(open_cols, key=lambda j, i=i: (inst.h[i, j], j))
        target = by_distance[0]
        for j in by_distance:
            if load[j] + _increment(inst, int(i), int(j), pilot_data_once=pilot_data_once) <= cap + CAPACITY_TOLERANCE:
                target = j
                break
        y[i, target] = True
        load[target] += _increment(inst, int(i), int(target), pilot_data_once=pilot_data_once)

    repaired = Assignment(open_mask.copy(), y)
    violations = capacity_violations(inst, repaired, pilot_data_once=pilot_data_once)
    for j in violations:
        logger.debug("Pilot %s over capacity after repair", inst.pilot_label(j))
    return Assignment(repaired.open, repaired.assign, violations)
