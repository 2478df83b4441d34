"""
Lagrangian relaxation of the capacitated P-median problem.

The capacity and single-assignment constraints are priced into the
objective with multipliers λ (per pilot) and μ (per member). What is
left decomposes per pilot: open the P pilots with the most negative
clipped reduced cost and attach every member whose reduced cost at an
open pilot is negative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from pilotmesh.exceptions import PilotMeshValidationError

from .instance import Assignment, Instance, capacity_load, check_dimensions

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

A_INTERCEPT = -2.9412
A_SLOPE = 0.017
A_FLOOR = 0.1
STEP_FRACTION = 0.01


@dataclass(frozen=True, slots=True, eq=False)
class Subgradients:
    """Capacity violation per pilot (zero for closed pilots) and coverage gap per member."""

    capacity: np.ndarray
    coverage: np.ndarray

    @property
    def squared_norm(self) -> float:
        return float(np.dot(self.capacity, self.capacity) + np.dot(self.coverage, self.coverage))


def objective(inst: Instance, a: Assignment) -> float:
    """Σ_j Σ_i d_i·h_ij·Y_ij in MB·meters."""
    check_dimensions(inst, a)
    return float(np.sum(inst.d[:, np.newaxis] * inst.h * a.assign))


def _as_vector(values: ArrayLike, size: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (size,):
        msg = f"{name} has shape {arr.shape}, expected ({size},)"
        raise PilotMeshValidationError(msg)
    return arr


def lagrangian_value(
    inst: Instance,
    a: Assignment,
    lam: ArrayLike,
    mu: ArrayLike,
    *,
    pilot_data_once: bool = False,
) -> float:
    """
    Relaxed objective for the given decision and multipliers.

    objective + Σ_j λ_j(load_j − P_cap) + Σ_i μ_i(1 − Σ_j Y_ij), summed over
    every eligible pilot. Uncapacitated instances carry no capacity term.
    """
    check_dimensions(inst, a)
    lam = _as_vector(lam, inst.e, "lambda")
    mu = _as_vector(mu, inst.m, "mu")
    if np.any(lam < 0):
        msg = "Capacity multipliers must be non-negative"
        raise PilotMeshValidationError(msg)

    value = objective(inst, a)
    if inst.capacitated:
        load = capacity_load(inst, a, pilot_data_once=pilot_data_once)
        value += float(np.dot(lam, load - inst.capacity))
    value += float(np.dot(mu, 1.0 - a.assign.sum(axis=1)))
    return value


def reduced_costs(inst: Instance, lam: np.ndarray, mu: np.ndarray, *, pilot_data_once: bool = False) -> np.ndarray:
    """Bracket d_i·h_iq + λ_q(d_i + d_q) − μ_i for every (member, pilot)."""
    d = inst.d[:, np.newaxis]
    per_member = d if pilot_data_once else d + inst.dj[np.newaxis, :]
    return d * inst.h + lam[np.newaxis, :] * per_member - mu[:, np.newaxis]


def subproblem_scores(
    inst: Instance,
    lam: ArrayLike,
    mu: ArrayLike,
    *,
    pilot_data_once: bool = False,
) -> np.ndarray:
    """
    V_q = Σ_i min(0, d_i·h_iq + λ_q(d_i + d_q) − μ_i) per eligible pilot.

    With ``pilot_data_once`` the pilot's own data leaves the bracket and
    λ_q·d_q is charged once as an opening cost instead.
    """
    lam = _as_vector(lam, inst.e, "lambda")
    mu = _as_vector(mu, inst.m, "mu")
    scores = np.minimum(0.0, reduced_costs(inst, lam, mu, pilot_data_once=pilot_data_once)).sum(axis=0)
    if pilot_data_once:
        scores = scores + lam * inst.dj
    return scores


def select_pilots(scores: ArrayLike, p: int) -> np.ndarray:
    """Open the ``p`` pilots with the smallest scores; ties go to the lowest index."""
    scores = np.asarray(scores, dtype=np.float64)
    if p > scores.size:
        msg = f"Cannot open {p} pilots out of {scores.size}"
        raise PilotMeshValidationError(msg)
    if p < 1:
        msg = f"P must be at least 1, got {p}"
        raise PilotMeshValidationError(msg)
    chosen = np.argsort(scores, kind="stable")[:p]
    z = np.zeros(scores.size, dtype=bool)
    z[chosen] = True
    return z


def assign_members(
    inst: Instance,
    open_mask: np.ndarray,
    lam: ArrayLike,
    mu: ArrayLike,
    *,
    pilot_data_once: bool = False,
) -> Assignment:
    """
    Relaxed assignment: Y_ir = 1 wherever pilot r is open and its bracket is negative.

    A member may end up on zero or several pilots.
    """
    lam = _as_vector(lam, inst.e, "lambda")
    mu = _as_vector(mu, inst.m, "mu")
    open_mask = np.asarray(open_mask, dtype=bool)
    y = (reduced_costs(inst, lam, mu, pilot_data_once=pilot_data_once) < 0) & open_mask[np.newaxis, :]
    return Assignment(open_mask.copy(), y)


def subgradients(inst: Instance, a: Assignment, *, pilot_data_once: bool = False) -> Subgradients:
    if inst.capacitated:
        load = capacity_load(inst, a, pilot_data_once=pilot_data_once)
        capacity = np.where(a.open, load - inst.capacity, 0.0)
    else:
        capacity = np.zeros(inst.e)
    coverage = 1.0 - a.assign.sum(axis=1)
    return Subgradients(capacity, coverage)


def polyak_step(grads: Subgradients, step_scale: float, dual_value: float) -> float:
    """
    t = A·(0.01·M) / ‖g‖².

    A vanished subgradient returns 0. The sign of ``dual_value`` is kept,
    so a negative relaxed value yields a negative step.
    """
    denominator = grads.squared_norm
    if denominator == 0:
        return 0.0
    return step_scale * (STEP_FRACTION * dual_value) / denominator


def step_size(
    inst: Instance,
    a: Assignment,
    step_scale: float,
    dual_value: float,
    *,
    pilot_data_once: bool = False,
) -> float:
    """Polyak step for the relaxed decision ``a``; 0 once every subgradient vanishes."""
    return polyak_step(subgradients(inst, a, pilot_data_once=pilot_data_once), step_scale, dual_value)


def stalled(previous: float, current: float, delta: float) -> bool:
    """Consecutive dual values within δ·max(1, |current|) of each other."""
    return abs(current - previous) <= delta * max(1.0, abs(current))


def update_multipliers(
    lam: ArrayLike,
    mu: ArrayLike,
    t: float,
    grads: Subgradients,
    *,
    ascent_sign: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Projected multiplier update.

    Default rule, applied for any sign of ``t``:
    λ' = max(0, λ − t·g_cap) and μ' = max(0, μ − t·g_cov).
    With ``ascent_sign`` the textbook ascent direction is used instead:
    λ' = max(0, λ + |t|·g_cap) and μ' = max(0, μ + |t|·g_cov).
    """
    lam = np.asarray(lam, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    if ascent_sign:
        step = abs(t)
        return np.maximum(0.0, lam + step * grads.capacity), np.maximum(0.0, mu + step * grads.coverage)
    return np.maximum(0.0, lam - t * grads.capacity), np.maximum(0.0, mu - t * grads.coverage)


def initial_step_scale(m: int, floor: float = A_FLOOR) -> float:
    """A = max(floor, 0.017·m − 2.9412); the regression line is negative below m ≈ 173."""
    if m < 1:
        msg = f"Member count must be at least 1, got {m}"
        raise PilotMeshValidationError(msg)
    return max(floor, A_SLOPE * m + A_INTERCEPT)


def initial_multipliers(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    """λ_j = 1/Σ d_j over eligible pilots and μ_i = m."""
    total = float(inst.dj.sum())
    if inst.capacitated and total > 0:
        lam = np.full(inst.e, 1.0 / total)
    else:
        lam = np.zeros(inst.e)
    return lam, np.full(inst.m, float(inst.m))
