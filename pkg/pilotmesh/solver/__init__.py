from .core import DualState, SolveReport, SolverLimits, TraceRow, check_capacity, rebalance, solve
from .instance import (
    Assignment,
    Instance,
    assign_nearest,
    capacity_load,
    capacity_violations,
    served_loads,
)
from .lagrangian import (
    Subgradients,
    assign_members,
    initial_multipliers,
    initial_step_scale,
    lagrangian_value,
    objective,
    polyak_step,
    select_pilots,
    stalled,
    step_size,
    subgradients,
    subproblem_scores,
    update_multipliers,
)
from .oracle import MAX_ORACLE_MEMBERS, MAX_ORACLE_PILOTS, OracleResult, brute_force_oracle
from .polish import feasibility_search, surrogate_cost, swap_search
from .repair import repair_feasibility

pilot_loads = capacity_load

__all__ = (
    "MAX_ORACLE_MEMBERS",
    "MAX_ORACLE_PILOTS",
    "Assignment",
    "DualState",
    "Instance",
    "OracleResult",
    "SolveReport",
    "SolverLimits",
    "Subgradients",
    "TraceRow",
    "assign_members",
    "assign_nearest",
    "brute_force_oracle",
    "capacity_load",
    "capacity_violations",
    "check_capacity",
    "feasibility_search",
    "initial_multipliers",
    "initial_step_scale",
    "lagrangian_value",
    "objective",
    "pilot_loads",
    "polyak_step",
    "rebalance",
    "repair_feasibility",
    "select_pilots",
    "served_loads",
    "solve",
    "stalled",
    "step_size",
    "subgradients",
    "subproblem_scores",
    "surrogate_cost",
    "swap_search",
    "update_multipliers",
)
