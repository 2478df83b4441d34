from __future__ import annotations

import logging

import numpy as np

from .instance import Assignment, Instance, assign_nearest, capacity_violations
from .lagrangian import objective
from .repair import repair_feasibility

logger = logging.getLogger("pilotmesh.solver")


def surrogate_cost(inst: Instance, open_cols: np.ndarray) -> float:
    """Uncapacitated cost Σ_i d_i·min_{j open} h_ij."""
    return float(np.dot(inst.d, inst.h[:, open_cols].min(axis=1)))


def swap_search(inst: Instance, open_mask: np.ndarray, max_passes: int = 50) -> np.ndarray:
    """
    Vertex-substitution local search on the uncapacitated surrogate.

    Each pass tries every (open, closed) exchange and applies the best
    strictly improving one. Stops at a local optimum or after
    ``max_passes`` exchanges.
    """
    current = np.flatnonzero(open_mask)
    closed = np.flatnonzero(~open_mask)
    best = surrogate_cost(inst, current)

    for _ in range(max_passes):
        move: tuple[int, int] | None = None
        move_cost = best
        for slot in range(current.size):
            trial = current.copy()
            for q in closed:
                trial[slot] = q
                cost = surrogate_cost(inst, trial)
                if cost < move_cost - 1e-9:
                    move_cost, move = cost, (slot, int(q))
        if move is None:
            break
        slot, q = move
        out = current[slot]
        current[slot] = q
        closed = np.where(closed == q, out, closed)
        best = move_cost

    mask = np.zeros(inst.e, dtype=bool)
    mask[current] = True
    return mask


def _repaired(inst: Instance, open_cols: np.ndarray, *, pilot_data_once: bool) -> tuple[tuple[int, float], Assignment]:
    mask = np.zeros(inst.e, dtype=bool)
    mask[open_cols] = True
    candidate = repair_feasibility(inst, assign_nearest(inst, mask), pilot_data_once=pilot_data_once)
    return (len(candidate.violations), objective(inst, candidate)), candidate


def feasibility_search(
    inst: Instance,
    start: Assignment,
    *,
    pilot_data_once: bool = False,
    max_passes: int = 50,
) -> Assignment:
    """
    Vertex substitution scored on repaired assignments.

    Candidates compare by violation count first, then by objective. The
    search stops as soon as an exchange reaches zero violations, at a
    local optimum, or after ``max_passes`` exchanges.
    """
    current = np.flatnonzero(start.open)
    closed = np.flatnonzero(~start.open)
    best_key, best = _repaired(inst, current, pilot_data_once=pilot_data_once)
    start_key = (len(capacity_violations(inst, start, pilot_data_once=pilot_data_once)), objective(inst, start))
    if start_key <= best_key:
        best_key, best = start_key, start

    for _ in range(max_passes):
        if best_key[0] == 0:
            break
        move: tuple[int, int] | None = None
        move_key, move_assignment = best_key, best
        for slot in range(current.size):
            trial = current.copy()
            for q in closed:
                trial[slot] = q
                key, candidate = _repaired(inst, trial, pilot_data_once=pilot_data_once)
                if key[0] < move_key[0] or (key[0] == move_key[0] and key[1] < move_key[1] - 1e-9):
                    move_key, move_assignment, move = key, candidate, (slot, int(q))
        if move is None:
            break
        slot, q = move
        out = current[slot]
        current[slot] = q
        closed = np.where(closed == q, out, closed)
        best_key, best = move_key, move_assignment

    logger.debug("Feasibility search ended with %d violations", best_key[0])
    return best
