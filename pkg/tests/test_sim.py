import pytest

from pilotmesh.exceptions import InfeasibleInstanceError, PilotMeshValidationError
from pilotmesh.model import file_key
from pilotmesh.overlay import LinkType, LookupCase, LookupResult, Outcome
from pilotmesh.qoe import ParameterId
from pilotmesh.sim import (
    METRIC_COLUMNS,
    MeasurementPolicy,
    Mode,
    SimConfig,
    Strategy,
    generate_scenario,
    place_pilots,
    run,
    run_many,
    run_modes,
    scenario_from_file,
    seed_streams,
)
from pilotmesh.sim.measure import LookupSample, parameter_percentages, sample_percentages
from pilotmesh.solver import brute_force_oracle, capacity_violations

BT = LinkType.BLUETOOTH_D2D
KEY = file_key("song.ogg")


class TestSimConfig:
    def test_defaults(self) -> None:
        """The default cell has 100 users and 10 pilots."""
        cfg = SimConfig()
        assert (cfg.n_users, cfg.n_pilots, cfg.isd, cfg.d2d_range) == (100, 10, 250, 20)
        assert cfg.vicinity_size == 10
        assert cfg.vicinity_radius == 25
        assert cfg.rated_parameters == (
            ParameterId.INTERNET_FREE_ACCESS,
            ParameterId.CHUNK_ACCESS_TIME,
            ParameterId.ENERGY_CONSUMPTION,
        )

    def test_more_pilots_than_users(self) -> None:
        """Pilots are drawn from the users."""
        with pytest.raises(PilotMeshValidationError) as exc_info:
            SimConfig(n_users=5, n_pilots=6)
        assert exc_info.value.pointer == "/n_pilots"

    def test_overrides_skip_none(self, small_config: SimConfig) -> None:
        """``None`` leaves a field untouched."""
        cfg = small_config.with_overrides(seed=5, n_users=None)
        assert cfg.seed == 5
        assert cfg.n_users == 20


class TestScenario:
    def test_deterministic(self, small_config: SimConfig) -> None:
        """The same seed gives the same devices."""
        a = generate_scenario(small_config)
        b = generate_scenario(small_config)
        assert a.topology.devices == b.topology.devices
        assert len(a.topology.devices) == 20
        assert len(a.topology.eligible) == small_config.n_eligible == 10

    def test_devices_inside_cell(self, small_config: SimConfig) -> None:
        """Every device lies in the disc."""
        scenario = generate_scenario(small_config)
        assert all(d.position.in_cell(small_config.isd) for d in scenario.topology.devices)

    def test_instance_shape(self, small_config: SimConfig) -> None:
        """Rows are users, columns eligible users."""
        instance = generate_scenario(small_config).instance
        assert (instance.m, instance.e, instance.p) == (20, 10, 3)
        assert instance.member_ids == list(range(20))

    def test_file_round_trip(self, small_config: SimConfig) -> None:
        """A scenario file carries enough to rebuild the instance."""
        scenario = generate_scenario(small_config)
        restored = scenario_from_file(scenario.to_file())
        assert restored.config.n_pilots == 3
        assert restored.instance.model_dump() == scenario.instance.model_dump()

    def test_streams_independent(self) -> None:
        """The three streams differ."""
        a, b, c = seed_streams(1)
        assert len({a.random(), b.random(), c.random()}) == 3


class TestPlacement:
    @pytest.mark.parametrize("strategy", list(Strategy))
    def test_every_device_attached(self, small_config: SimConfig, strategy: Strategy) -> None:
        """Pilots head their own group and everyone has a pilot."""
        scenario = generate_scenario(small_config)
        placement = place_pilots(scenario.topology, scenario.instance, strategy, seed_streams(0)[1])
        assert len(placement.pilots) == 3
        assert set(placement.attachment) == set(range(20))
        assert all(placement.attachment[p] == p for p in placement.pilots)
        eligible = {d.device_id for d in scenario.topology.eligible}
        assert set(placement.pilots) <= eligible
        non_pilot_total = sum(d.shared_mb for d in scenario.topology.devices if d.device_id not in placement.pilots)
        assert sum(placement.loads.values()) == non_pilot_total

    def test_pmedian_keeps_report(self, small_config: SimConfig) -> None:
        """The solver report travels with the placement."""
        scenario = generate_scenario(small_config)
        placement = place_pilots(scenario.topology, scenario.instance, Strategy.PMEDIAN, seed_streams(0)[1])
        assert placement.report is not None
        pilot_ids = scenario.instance.pilot_ids
        assert placement.pilots == tuple(sorted(pilot_ids[j] for j in placement.report.open_pilots))

    def test_pmedian_respects_capacity(self) -> None:
        """Whenever a feasible assignment exists, no optimised pilot serves more than P_cap."""
        placed = 0
        for seed in range(30):
            scenario = generate_scenario(SimConfig(n_users=10, n_pilots=3, p_cap_mb=1000, seed=seed))
            try:
                brute_force_oracle(scenario.instance)
            except InfeasibleInstanceError:
                continue
            placement = place_pilots(scenario.topology, scenario.instance, Strategy.PMEDIAN, seed_streams(seed)[1])
            assert placement.report is not None
            assert capacity_violations(scenario.instance, placement.report.assignment) == ()
            assert all(load <= 1000 for load in placement.loads.values())
            placed += 1
        assert placed >= 1


class TestMeasure:
    def test_found_in_vicinity(self) -> None:
        """A two-hop vicinity hit scores on every parameter."""
        result = LookupResult(3, KEY, Outcome.FOUND, LookupCase.CASE1, (BT, BT), holder=1)
        pct = sample_percentages(LookupSample(result, 1, 1, keyword_nearby=True), MeasurementPolicy())
        assert [pct[p] for p in ParameterId] == pytest.approx([100, 83.3333, 90, 100, 100, 100, 50, 100, 62.5], abs=1e-3)

    def test_not_found(self) -> None:
        """A miss only keeps the join-side parameters."""
        result = LookupResult(3, KEY, Outcome.NOT_FOUND, LookupCase.CASE3, (BT, LinkType.WIFI, LinkType.CELLULAR))
        pct = sample_percentages(LookupSample(result, 0, 2, keyword_nearby=False), MeasurementPolicy())
        assert pct[ParameterId.INTERNET_FREE_ACCESS] == 0
        assert pct[ParameterId.CHUNK_ACCESS_TIME] == 0
        assert pct[ParameterId.PILOT_HOP_DISTANCE] == 50
        assert pct[ParameterId.JOIN_TIME] == 50

    def test_empty_ledger(self) -> None:
        """Nothing to average is an error."""
        with pytest.raises(PilotMeshValidationError):
            parameter_percentages([], MeasurementPolicy())


class TestRun:
    def test_rows_cover_columns(self, small_config: SimConfig) -> None:
        """Every iteration yields one full metrics row."""
        metrics = run(small_config)
        assert len(metrics.iterations) == 3
        for it in metrics.iterations:
            assert it.lookups == 20
            assert tuple(it.to_row()) == METRIC_COLUMNS
            assert -2 <= it.mean_us <= 2

    def test_deterministic(self, small_config: SimConfig) -> None:
        """Identical seeds give identical rows."""
        assert run(small_config).rows() == run(small_config).rows()

    def test_lookup_callback(self, small_config: SimConfig) -> None:
        """Every lookup is reported with its iteration."""
        seen: list[int] = []
        run(small_config, on_lookup=lambda index, _result: seen.append(index))
        assert len(seen) == 60
        assert seen[0] == 1
        assert seen[-1] == 3

    def test_d2d_only_uses_direct_pairing(self, small_config: SimConfig) -> None:
        """Without the overlay only case 0 resolves lookups."""
        metrics = run(small_config.with_overrides(mode=Mode.D2D_ONLY))
        assert metrics.pilot_loads == {}
        for it in metrics.iterations:
            assert set(it.cases) <= {"case0", "not_found"}
            assert it.max_pilot_load_mb == 0

    def test_dht_stays_in_region(self, small_config: SimConfig) -> None:
        """With WiFi on every pilot no lookup leaves the pilot tier."""
        metrics = run(small_config)
        for it in metrics.iterations:
            assert it.cases.get("case3", 0) == 0
            assert it.cases.get("not_found", 0) == 0

    def test_repeated_searches_stay_local(self, small_config: SimConfig) -> None:
        """Searching only past files resolves inside the vicinity."""
        metrics = run(small_config.with_overrides(new_file_fraction=0.0))
        assert [it.mean_us for it in metrics.iterations[1:]] == pytest.approx([2.0, 2.0])

    def test_modes_share_placement(self, small_config: SimConfig) -> None:
        """Both modes run over the same pilots."""
        d2d, dht = run_modes(small_config, (Mode.D2D_ONLY, Mode.DHT_D2D))
        assert d2d.pilots == dht.pilots
        assert (d2d.mode, dht.mode) == (Mode.D2D_ONLY, Mode.DHT_D2D)

    def test_run_many_order(self, small_config: SimConfig) -> None:
        """Results come in seed order, then mode order."""
        results = run_many(small_config, [4, 2], [Mode.DHT_D2D, Mode.D2D_ONLY])
        assert [(r.seed, r.mode) for r in results] == [
            (4, Mode.DHT_D2D),
            (4, Mode.D2D_ONLY),
            (2, Mode.DHT_D2D),
            (2, Mode.D2D_ONLY),
        ]

    def test_run_many_workers(self, small_config: SimConfig) -> None:
        """The pool size does not change the results."""
        serial = run_many(small_config, [1, 2])
        pooled = run_many(small_config, [1, 2], workers=2)
        assert [r.rows() for r in serial] == [r.rows() for r in pooled]
