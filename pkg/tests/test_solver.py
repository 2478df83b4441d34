import numpy as np
import pytest

from pilotmesh.exceptions import InfeasibleInstanceError, PilotMeshValidationError
from pilotmesh.solver import (
    Assignment,
    Instance,
    SolverLimits,
    Subgradients,
    assign_members,
    capacity_load,
    capacity_violations,
    check_capacity,
    feasibility_search,
    initial_multipliers,
    initial_step_scale,
    lagrangian_value,
    objective,
    pilot_loads,
    polyak_step,
    rebalance,
    repair_feasibility,
    select_pilots,
    served_loads,
    solve,
    stalled,
    step_size,
    subproblem_scores,
    swap_search,
    update_multipliers,
)


def _all_on(column: int, m: int, e: int) -> Assignment:
    return Assignment.from_vector([column] * m, [column], e)


def _with(inst: Instance, **changes: float) -> Instance:
    return Instance.model_validate({**inst.model_dump(by_alias=True), **changes})


class TestInstance:
    def test_aliases_and_dimensions(self, tiny_instance: Instance) -> None:
        """P and P_cap are read by alias."""
        assert (tiny_instance.m, tiny_instance.e, tiny_instance.p) == (3, 2, 1)
        assert tiny_instance.capacity == 1000
        assert tiny_instance.total_demand == 30

    def test_infinite_capacity_is_uncapacitated(self) -> None:
        """An infinite P_cap disables the capacity side."""
        inst = Instance(demands=[1], pilot_data=[1], dist=[[0]], P=1, P_cap=float("inf"))
        assert not inst.capacitated

    def test_ragged_dist_pointer(self) -> None:
        """Row length errors point at the row."""
        with pytest.raises(PilotMeshValidationError) as exc_info:
            Instance(demands=[1, 1], pilot_data=[1, 1], dist=[[0, 1], [1]], P=1)
        assert exc_info.value.pointer == "/dist/1"

    def test_too_many_pilots(self) -> None:
        """P cannot exceed the candidates."""
        with pytest.raises(PilotMeshValidationError):
            Instance(demands=[1], pilot_data=[1], dist=[[0]], P=2)

    def test_arrays_read_only(self, tiny_instance: Instance) -> None:
        """Cached arrays cannot be mutated."""
        with pytest.raises(ValueError, match="read-only"):
            tiny_instance.h[0, 0] = 9


class TestLoads:
    def test_capacity_load_forms(self, tiny_instance: Instance) -> None:
        """Literal load counts pilot data per member, the once-form per pilot."""
        a = _all_on(0, 3, 2)
        assert capacity_load(tiny_instance, a).tolist() == [60, 0]
        assert capacity_load(tiny_instance, a, pilot_data_once=True).tolist() == [40, 0]
        assert served_loads(tiny_instance, a).tolist() == [30, 0]
        assert pilot_loads(tiny_instance, a).tolist() == [60, 0]

    def test_objective(self, tiny_instance: Instance) -> None:
        """Opening a costs 70 and opening b 110."""
        assert objective(tiny_instance, _all_on(0, 3, 2)) == 70
        assert objective(tiny_instance, _all_on(1, 3, 2)) == 110

    def test_violations(self, tiny_instance: Instance) -> None:
        """A tight cap flags the open pilot."""
        tight = _with(tiny_instance, P_cap=45)
        assert capacity_violations(tight, _all_on(0, 3, 2)) == (0,)
        assert capacity_violations(tight, _all_on(0, 3, 2), pilot_data_once=True) == ()


class TestLagrangian:
    def test_initial_multipliers(self, tiny_instance: Instance) -> None:
        """λ starts at the inverse pilot data and μ at m."""
        lam, mu = initial_multipliers(tiny_instance)
        assert lam.tolist() == pytest.approx([0.05, 0.05])
        assert mu.tolist() == [3, 3, 3]

    def test_first_relaxation(self, tiny_instance: Instance) -> None:
        """No reduced cost is negative on the first iteration."""
        lam, mu = initial_multipliers(tiny_instance)
        scores = subproblem_scores(tiny_instance, lam, mu)
        assert scores.tolist() == [0, 0]
        open_mask = select_pilots(scores, 1)
        assert open_mask.tolist() == [True, False]
        relaxed = assign_members(tiny_instance, open_mask, lam, mu)
        assert not relaxed.assign.any()
        assert lagrangian_value(tiny_instance, relaxed, lam, mu) == pytest.approx(-91)

    def test_lagrangian_value(self, tiny_instance: Instance) -> None:
        """Capacity slack is priced by λ."""
        inst = _with(tiny_instance, P_cap=100)
        value = lagrangian_value(inst, _all_on(0, 3, 2), [0.1, 0], [0, 0, 0])
        assert value == pytest.approx(66)

    def test_negative_lambda_rejected(self, tiny_instance: Instance) -> None:
        """Capacity multipliers stay non-negative."""
        with pytest.raises(PilotMeshValidationError):
            lagrangian_value(tiny_instance, _all_on(0, 3, 2), [-1, 0], [0, 0, 0])

    def test_polyak_step(self) -> None:
        """t = A·0.01·M / ‖g‖²."""
        grads = Subgradients(np.array([3.0, 4.0]), np.zeros(3))
        assert polyak_step(grads, 2, 50) == pytest.approx(0.04)
        assert polyak_step(Subgradients(np.zeros(2), np.zeros(3)), 2, 50) == 0

    def test_step_size_from_decision(self) -> None:
        """One member on three open pilots has coverage gap -2, so t = 1·0.01·100 / 4."""
        inst = Instance(demands=[1], pilot_data=[1, 1, 1], dist=[[0, 0, 0]], P=3)
        everywhere = Assignment(np.ones(3, dtype=bool), np.ones((1, 3), dtype=bool))
        assert step_size(inst, everywhere, 1.0, 100.0) == pytest.approx(0.25)
        single = Assignment.from_vector([1], [0, 1, 2], 3)
        assert step_size(inst, single, 1.0, 100.0) == 0

    def test_stalled_is_relative_to_current_value(self) -> None:
        """Consecutive values count as stalled within δ·max(1, |M|)."""
        assert stalled(100.0, 100.05, 1e-3)
        assert not stalled(100.0, 100.2, 1e-3)
        assert stalled(-90.0, -90.05, 1e-3)
        assert stalled(0.0, 5e-4, 1e-3)
        assert not stalled(0.0, 2e-3, 1e-3)

    def test_update_rules(self) -> None:
        """Both update rules project onto the non-negative orthant."""
        grads = Subgradients(np.array([1.0, -2.0]), np.array([2.0]))
        lam, mu = update_multipliers([1, 0], [0.5], 0.5, grads)
        assert lam.tolist() == [0.5, 1]
        assert mu.tolist() == [0]
        lam, mu = update_multipliers([1, 0], [0.5], 0.5, grads, ascent_sign=True)
        assert lam.tolist() == [1.5, 0]
        assert mu.tolist() == [1.5]

    def test_initial_step_scale(self) -> None:
        """The regression line is floored for small cells."""
        assert initial_step_scale(100) == 0.1
        assert initial_step_scale(500) == pytest.approx(5.5588)
        with pytest.raises(PilotMeshValidationError):
            initial_step_scale(0)


class TestRepair:
    def test_multiple_assignment_keeps_cheapest(self, uncapacitated_instance: Instance) -> None:
        """Members on both pilots keep the cheaper one."""
        relaxed = Assignment(np.array([True, True]), np.ones((3, 2), dtype=bool))
        repaired = repair_feasibility(uncapacitated_instance, relaxed)
        assert repaired.pilot_of.tolist() == [0, 0, 1]
        assert repaired.violations == ()

    def test_overload_sheds_and_flags(self, tiny_instance: Instance) -> None:
        """A member that fits nowhere returns with a violation flag."""
        inst = _with(tiny_instance, P_cap=45)
        repaired = repair_feasibility(inst, _all_on(0, 3, 2))
        assert repaired.pilot_of.tolist() == [0, 0, 0]
        assert repaired.violations == (0,)

    def test_feasible_returned_unchanged(self, tiny_instance: Instance) -> None:
        """Nothing to repair returns the same object."""
        a = _all_on(0, 3, 2)
        assert repair_feasibility(tiny_instance, a) is a

    def test_wrong_open_count(self, uncapacitated_instance: Instance) -> None:
        """Repair works on exactly P open pilots."""
        with pytest.raises(PilotMeshValidationError):
            repair_feasibility(uncapacitated_instance, _all_on(0, 3, 2))


class TestSolve:
    def test_tiny_instance(self, tiny_instance: Instance) -> None:
        """The cheaper pilot wins and the bound stays below it."""
        report = solve(tiny_instance)
        assert report.open_pilots == (0,)
        assert report.primal_objective == pytest.approx(70)
        assert report.dual_bound <= 70 + 1e-9
        assert report.feasible
        assert report.iterations == 200
        assert report.converged_at is None
        assert len(report.trace) == 200

    def test_uncapacitated(self, uncapacitated_instance: Instance) -> None:
        """Each member ends at its nearest pilot."""
        report = solve(uncapacitated_instance)
        assert report.open_pilots == (0, 1)
        assert report.assignment.pilot_of.tolist() == [0, 0, 1]
        assert report.primal_objective == pytest.approx(30)

    def test_infeasible(self) -> None:
        """Demand above P·P_cap is rejected up front."""
        inst = Instance(demands=[600, 600], pilot_data=[0, 0], dist=[[0, 1], [1, 0]], P=1, P_cap=1000)
        with pytest.raises(InfeasibleInstanceError) as exc_info:
            solve(inst)
        assert exc_info.value.details["total_demand"] == 1200

    def test_check_capacity_bounds(self, tiny_instance: Instance, uncapacitated_instance: Instance) -> None:
        """Only a capacitated instance with demand above P·P_cap fails the check."""
        check_capacity(tiny_instance)
        check_capacity(uncapacitated_instance)
        with pytest.raises(InfeasibleInstanceError) as exc_info:
            check_capacity(_with(tiny_instance, P_cap=20))
        assert exc_info.value.details["capacity"] == 20

    @pytest.mark.parametrize(
        ("ascent_sign", "duals", "scales", "converged_at", "halvings"),
        [
            (False, [9.0, 8.991, 8.982009], [0.1, 0.1, 0.1], None, 0),
            (True, [9.0, 9.009, 9.018009], [0.1, 0.1, 0.05], 2, 2),
        ],
    )
    def test_dual_trajectory(
        self,
        uncapacitated_instance: Instance,
        ascent_sign: bool,
        duals: list[float],
        scales: list[float],
        converged_at: int | None,
        halvings: int,
    ) -> None:
        """Three iterations from μ = 3 follow the fixed-attachment trajectory under either sign."""
        limits = SolverLimits(max_iter=3, polish=False, ascent_sign=ascent_sign)
        report = solve(uncapacitated_instance, limits)
        assert report.iterations == 3
        assert [row.dual for row in report.trace] == pytest.approx(duals, rel=1e-12)
        assert [row.best_dual for row in report.trace] == pytest.approx(
            [max(duals[: k + 1]) for k in range(3)], rel=1e-12
        )
        assert [row.step_scale for row in report.trace] == pytest.approx(scales)
        assert report.trace[0].step == pytest.approx(0.003)
        assert report.converged_at == converged_at
        assert report.halvings == halvings

    def test_settles_capacity_without_exact_search(self) -> None:
        """Only b fits the cap; the repaired swap search finds it without the exhaustive fallback."""
        inst = Instance(demands=[10, 10, 10], pilot_data=[100, 0], dist=[[1, 5], [1, 5], [5, 1]], P=1, P_cap=50)
        report = solve(inst, SolverLimits(exact_fallback=False))
        assert report.feasible
        assert report.open_pilots == (1,)
        assert report.primal_objective == pytest.approx(110)

    def test_iteration_cap(self, tiny_instance: Instance) -> None:
        """The loop stops at max_iter."""
        report = solve(tiny_instance, SolverLimits(max_iter=1, polish=False))
        assert report.iterations == 1
        assert report.open_pilots == (0,)

    def test_to_dict(self, tiny_instance: Instance) -> None:
        """The JSON view names pilots and leaves out timing."""
        data = solve(tiny_instance).to_dict(tiny_instance, {"seed": 1})
        assert data["meta"] == {"seed": 1}
        assert data["open_pilots"] == [0]
        assert data["assignment"] == [0, 0, 0]
        assert "elapsed" not in data
        assert {"k", "dual", "best_dual", "step_scale", "step"} == set(data["trace"][0])

    def test_bad_warm_start(self, tiny_instance: Instance) -> None:
        """A warm start must name P pilots."""
        with pytest.raises(PilotMeshValidationError):
            solve(tiny_instance, warm_start=[0, 1])

    def test_invalid_limits(self) -> None:
        """Limits are checked on construction."""
        with pytest.raises(PilotMeshValidationError):
            SolverLimits(max_iter=0)
        with pytest.raises(PilotMeshValidationError):
            SolverLimits(delta=0)


class TestRebalance:
    def test_no_violation_keeps_current(self, tiny_instance: Instance) -> None:
        """A feasible assignment is not touched."""
        current = _all_on(0, 3, 2)
        assert rebalance(tiny_instance, current) is current

    def test_overloaded_pilot_moves_members(self, tiny_instance: Instance) -> None:
        """With two pilots to open, rebalancing spreads the load."""
        inst = _with(tiny_instance, P=2, P_cap=45)
        current = Assignment.from_vector([0, 0, 0], [0, 1], 2)
        result = rebalance(inst, current)
        assert capacity_violations(inst, result) == ()
        assert result.pilot_of.tolist() == [0, 0, 1]


class TestSwapSearch:
    def test_moves_to_better_pilot(self, tiny_instance: Instance) -> None:
        """Starting from b the exchange reaches a."""
        assert swap_search(tiny_instance, np.array([False, True])).tolist() == [True, False]


class TestFeasibilitySearch:
    @pytest.fixture
    def heavy_a(self) -> Instance:
        """Pilot a carries 100 MB of its own data, so only b fits a 50 MB cap."""
        return Instance(demands=[10, 10, 10], pilot_data=[100, 0], dist=[[1, 5], [1, 5], [5, 1]], P=1, P_cap=50)

    def test_leaves_violating_pilot(self, heavy_a: Instance) -> None:
        """The exchange trades objective for feasibility."""
        start = repair_feasibility(heavy_a, _all_on(0, 3, 2))
        assert start.violations == (0,)
        result = feasibility_search(heavy_a, start)
        assert result.open_pilots == (1,)
        assert result.violations == ()
        assert result.pilot_of.tolist() == [1, 1, 1]
        assert objective(heavy_a, result) == pytest.approx(110)

    def test_feasible_start_kept(self, tiny_instance: Instance) -> None:
        """A start without violations is not exchanged."""
        start = _all_on(0, 3, 2)
        assert feasibility_search(tiny_instance, start) is start
