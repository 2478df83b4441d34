from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Annotated, Any

import numpy as np
from annotated_doc import Doc

from pilotmesh.exceptions import InfeasibleInstanceError, PilotMeshValidationError

from .instance import Assignment, Instance, assign_nearest, capacity_violations
from .lagrangian import (
    A_FLOOR,
    assign_members,
    initial_multipliers,
    initial_step_scale,
    lagrangian_value,
    objective,
    select_pilots,
    stalled,
    step_size,
    subgradients,
    subproblem_scores,
    update_multipliers,
)
from .oracle import MAX_ORACLE_MEMBERS, MAX_ORACLE_PILOTS, brute_force_oracle
from .polish import feasibility_search, swap_search
from .repair import repair_feasibility

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger("pilotmesh.solver")


@dataclass
class SolverLimits:
    max_iter: int = 200
    delta: float = 1e-3
    """Relative change between consecutive dual values that counts as a stall."""
    max_halvings: int = 10
    step_floor: float = A_FLOOR
    ascent_sign: bool = False
    pilot_data_once: bool = False
    polish: bool = True
    max_polish_passes: int = 50
    exact_fallback: bool = True
    """Settle leftover capacity violations exhaustively when the instance is small enough."""

    def __post_init__(self) -> None:
        if self.max_iter < 1:
            msg = f"max_iter must be at least 1, got {self.max_iter}"
            raise PilotMeshValidationError(msg)
        if self.delta <= 0:
            msg = f"delta must be positive, got {self.delta}"
            raise PilotMeshValidationError(msg)
        if self.step_floor <= 0:
            msg = f"step_floor must be positive, got {self.step_floor}"
            raise PilotMeshValidationError(msg)


@dataclass(slots=True, eq=False)
class DualState:
    lam: np.ndarray
    mu: np.ndarray
    step_scale: float
    k: int = 0
    best_dual: float = -np.inf


@dataclass(frozen=True, slots=True)
class TraceRow:
    k: int
    dual: float
    best_dual: float
    step_scale: float
    step: float
    primal: float


@dataclass(frozen=True, slots=True, eq=False)
class SolveReport:
    assignment: Assignment
    primal_objective: float
    dual_bound: float
    iterations: int
    repaired: bool
    converged_at: int | None = None
    halvings: int = 0
    trace: tuple[TraceRow, ...] = field(default=())
    elapsed: float = field(default=0.0, compare=False)

    @property
    def open_pilots(self) -> tuple[int, ...]:
        return self.assignment.open_pilots

    @property
    def violations(self) -> tuple[int, ...]:
        return self.assignment.violations

    @property
    def feasible(self) -> bool:
        return not self.assignment.violations

    def to_dict(self, inst: Instance, meta: dict[str, Any] | None = None) -> dict[str, Any]:
        """JSON view; wall-clock time is left out so reports are reproducible."""
        pilot_of = self.assignment.pilot_of
        return {
            "meta": meta or {},
            "objective": self.primal_objective,
            "dual_bound": self.dual_bound,
            "open_pilots": [inst.pilot_label(j) for j in self.open_pilots],
            "assignment": [inst.pilot_label(int(j)) if j >= 0 else None for j in pilot_of],
            "iterations": self.iterations,
            "converged_at": self.converged_at,
            "halvings": self.halvings,
            "violations": [inst.pilot_label(j) for j in self.violations],
            "repaired": self.repaired,
            "trace": [
                {
                    "k": row.k,
                    "dual": row.dual,
                    "best_dual": row.best_dual,
                    "step_scale": row.step_scale,
                    "step": row.step,
                }
                for row in self.trace
            ],
        }


@dataclass(slots=True)
class _Incumbent:
    assignment: Assignment | None = None
    key: tuple[int, float] = (np.iinfo(np.int64).max, np.inf)
    repaired: bool = False

    def offer(self, inst: Instance, candidate: Assignment, *, repaired: bool) -> bool:
        key = (len(candidate.violations), objective(inst, candidate))
        if key[0] < self.key[0] or (key[0] == self.key[0] and key[1] < self.key[1] - 1e-9):
            self.assignment, self.key, self.repaired = candidate, key, repaired
            return True
        return False


def check_capacity(inst: Instance) -> None:
    """
    Raises:
        InfeasibleInstanceError: total demand exceeds P·P_cap.
    """
    if not inst.capacitated:
        return
    capacity = inst.p * inst.capacity
    if inst.total_demand > capacity:
        msg = f"Total demand {inst.total_demand:g} MB exceeds P·P_cap = {capacity:g} MB"
        raise InfeasibleInstanceError(msg, total_demand=inst.total_demand, capacity=capacity)


def _complete(inst: Instance, relaxed: Assignment, incumbent: _Incumbent, limits: SolverLimits) -> None:
    once = limits.pilot_data_once
    repaired = repair_feasibility(inst, relaxed, pilot_data_once=once)
    incumbent.offer(inst, repaired, repaired=repaired is not relaxed)
    nearest = assign_nearest(inst, relaxed.open)
    incumbent.offer(inst, repair_feasibility(inst, nearest, pilot_data_once=once), repaired=True)


def _settle_violations(inst: Instance, incumbent: _Incumbent, limits: SolverLimits) -> None:
    once = limits.pilot_data_once
    assert incumbent.assignment is not None
    if incumbent.key[0] == 0:
        return
    rescued = feasibility_search(inst, incumbent.assignment, pilot_data_once=once, max_passes=limits.max_polish_passes)
    incumbent.offer(inst, rescued, repaired=True)
    if incumbent.key[0] == 0 or not limits.exact_fallback:
        return
    if inst.m > MAX_ORACLE_MEMBERS or inst.e > MAX_ORACLE_PILOTS:
        return
    try:
        exact = brute_force_oracle(inst, pilot_data_once=once)
    except InfeasibleInstanceError:
        logger.info("No pilot subset admits a capacity-feasible assignment")
        return
    incumbent.offer(inst, exact.assignment, repaired=True)


def solve(
    inst: Instance,
    limits: Annotated[
        SolverLimits | None,
        Doc(
            """
            Iteration cap, stall threshold, halving budget and capacity form.

            Defaults to ``SolverLimits()``.
            """
        ),
    ] = None,
    *,
    warm_start: Annotated[
        Sequence[int] | None,
        Doc(
            """
            Column indices of ``P`` pilots whose nearest-pilot assignment
            seeds the primal incumbent.
            """
        ),
    ] = None,
) -> SolveReport:
    """
    Lagrangian heuristic for the capacitated P-median problem.

    Every iteration opens the P best-scoring pilots, evaluates the relaxed
    value M, repairs the relaxed assignment into a primal candidate and
    moves the multipliers along a Polyak step. The step scale A is halved
    whenever two consecutive dual values differ by at most δ·max(1, |M|);
    the loop ends after ``max_iter`` iterations, on a zero step, or once
    A has been halved more than ``max_halvings`` times.

    Afterwards the best primal is polished by swap search. Leftover
    capacity violations trigger a swap search on repaired assignments and,
    for instances within the oracle limits, an exhaustive search.

    Raises:
        InfeasibleInstanceError: total demand exceeds P·P_cap.
    """
    limits = limits or SolverLimits()
    check_capacity(inst)
    once = limits.pilot_data_once
    started = time.perf_counter()

    lam, mu = initial_multipliers(inst)
    state = DualState(lam, mu, initial_step_scale(inst.m, limits.step_floor))
    incumbent = _Incumbent()
    trace: list[TraceRow] = []
    converged_at: int | None = None
    halvings = 0
    previous_dual: float | None = None

    if warm_start is not None:
        seeded = np.zeros(inst.e, dtype=bool)
        seeded[list(warm_start)] = True
        if int(seeded.sum()) != inst.p:
            msg = f"warm_start must name exactly P={inst.p} distinct pilots"
            raise PilotMeshValidationError(msg)
        incumbent.offer(
            inst,
            repair_feasibility(inst, assign_nearest(inst, seeded), pilot_data_once=once),
            repaired=True,
        )

    for k in range(1, limits.max_iter + 1):
        state.k = k
        scores = subproblem_scores(inst, state.lam, state.mu, pilot_data_once=once)
        open_mask = select_pilots(scores, inst.p)
        relaxed = assign_members(inst, open_mask, state.lam, state.mu, pilot_data_once=once)
        dual = lagrangian_value(inst, relaxed, state.lam, state.mu, pilot_data_once=once)
        state.best_dual = max(state.best_dual, dual)
        _complete(inst, relaxed, incumbent, limits)

        grads = subgradients(inst, relaxed, pilot_data_once=once)
        step = step_size(inst, relaxed, state.step_scale, dual, pilot_data_once=once)
        trace.append(TraceRow(k, dual, state.best_dual, state.step_scale, step, incumbent.key[1]))
        logger.debug(
            "k=%d M=%.6g best=%.6g A=%.4g t=%.4g",
            k, dual, state.best_dual, state.step_scale, step,
        )

        if step == 0:
            converged_at = converged_at or k
            break
        if previous_dual is not None and stalled(previous_dual, dual, limits.delta):
            converged_at = converged_at or k
            halvings += 1
            if halvings > limits.max_halvings:
                break
            state.step_scale /= 2
        previous_dual = dual

        state.lam, state.mu = update_multipliers(state.lam, state.mu, step, grads, ascent_sign=limits.ascent_sign)

    if limits.polish and incumbent.assignment is not None:
        polished = swap_search(inst, incumbent.assignment.open, limits.max_polish_passes)
        if not np.array_equal(polished, incumbent.assignment.open):
            candidate = repair_feasibility(inst, assign_nearest(inst, polished), pilot_data_once=once)
            incumbent.offer(inst, candidate, repaired=True)
    _settle_violations(inst, incumbent, limits)

    best = incumbent.assignment
    assert best is not None  # max_iter >= 1
    elapsed = time.perf_counter() - started
    violations = capacity_violations(inst, best, pilot_data_once=once)
    for j in violations:
        logger.warning("Pilot %s exceeds P_cap=%g MB", inst.pilot_label(j), inst.capacity)
    logger.info(
        "[RESULT] solve: %d iterations in %.3fs, objective %.6g, bound %.6g, %d violations",
        state.k, elapsed, incumbent.key[1], state.best_dual, len(violations),
    )

    return SolveReport(
        assignment=best,
        primal_objective=incumbent.key[1],
        dual_bound=state.best_dual,
        iterations=state.k,
        repaired=incumbent.repaired,
        converged_at=converged_at,
        halvings=halvings,
        trace=tuple(trace),
        elapsed=elapsed,
    )


def rebalance(inst: Instance, current: Assignment, limits: SolverLimits | None = None) -> Assignment:
    """
    Re-run the placement when some pilot exceeds its serving capacity.

    The current open set seeds the first iteration. The new assignment is
    returned only if it carries fewer capacity violations.
    """
    limits = limits or SolverLimits()
    before = capacity_violations(inst, current, pilot_data_once=limits.pilot_data_once)
    if not before:
        return current
    logger.info("Rebalancing %d overloaded pilots", len(before))
    report = solve(inst, limits, warm_start=current.open_pilots)
    if len(report.violations) < len(before):
        return report.assignment
    return current
