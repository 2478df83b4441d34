"""
The iterated file-sharing experiment.

Each iteration injects new files at random holders, then every user
issues one lookup, either through the two-tier overlay (``dht_d2d``) or
by eNodeB-paired direct D2D (``d2d_only``). Every lookup is measured,
rated and scored; the iteration's scores are averaged into one metrics
row.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Annotated, Any

from annotated_doc import Doc

from pilotmesh.model import FileKey, d2d_hops, file_key, in_vicinity
from pilotmesh.overlay import LinkType, LookupCase, LookupResult, Overlay
from pilotmesh.qoe import ParameterId, rate_percentage, us_overall

from .config import Mode, SimConfig, Strategy
from .measure import LookupSample, parameter_percentages, sample_percentages
from .placement import Placement, place_pilots
from .scenario import PLACEMENT, WORKLOAD, Scenario, build_instance, generate_scenario, seed_streams

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    import numpy as np

    from pilotmesh.model import Topology
    from pilotmesh.solver import SolverLimits

logger = logging.getLogger("pilotmesh.sim")

NOT_FOUND = "not_found"
CASE_COLUMNS: tuple[str, ...] = (*(case.value for case in LookupCase), NOT_FOUND)
METRIC_COLUMNS: tuple[str, ...] = (
    "seed",
    "iteration",
    "mode",
    "mean_us",
    *CASE_COLUMNS,
    *(link.value for link in LinkType),
    "max_pilot_load_mb",
    *(f"pct_{int(p)}" for p in ParameterId),
)


@dataclass(frozen=True, slots=True)
class IterationMetrics:
    seed: int
    iteration: int
    mode: Mode
    mean_us: float
    """Mean overall satisfaction across users, on the [-2, 2] scale."""
    cases: dict[str, int]
    """Found lookups per case, plus ``not_found``."""
    links: dict[LinkType, int]
    max_pilot_load_mb: float
    percentages: dict[ParameterId, float]

    @property
    def lookups(self) -> int:
        return sum(self.cases.values())

    def to_row(self) -> dict[str, Any]:
        row: dict[str, Any] = {
            "seed": self.seed,
            "iteration": self.iteration,
            "mode": self.mode.value,
            "mean_us": self.mean_us,
        }
        row.update({column: self.cases.get(column, 0) for column in CASE_COLUMNS})
        row.update({link.value: self.links.get(link, 0) for link in LinkType})
        row["max_pilot_load_mb"] = self.max_pilot_load_mb
        row.update({f"pct_{int(p)}": self.percentages[p] for p in ParameterId})
        return row


@dataclass(frozen=True, slots=True)
class RunMetrics:
    """One (config, seed, mode) run."""

    seed: int
    mode: Mode
    strategy: Strategy
    pilots: tuple[int, ...]
    pilot_loads: dict[int, float]
    """MB served per pilot; empty in ``d2d_only`` mode."""
    iterations: tuple[IterationMetrics, ...] = field(default=())

    @property
    def mean_us(self) -> float:
        if not self.iterations:
            return 0.0
        return sum(it.mean_us for it in self.iterations) / len(self.iterations)

    @property
    def max_pilot_load(self) -> float:
        return max(self.pilot_loads.values(), default=0.0)

    def rows(self) -> list[dict[str, Any]]:
        return [it.to_row() for it in self.iterations]


class _Workload:
    """File catalogue and per-group search histories, driven by one generator."""

    def __init__(self, cfg: SimConfig, rng: np.random.Generator, device_ids: Sequence[int]) -> None:
        self.cfg = cfg
        self.rng = rng
        self.device_ids = list(device_ids)
        self.width = sum(cfg.id_widths)
        self.count = 0
        self.history: dict[int, list[FileKey]] = {}
        self._seen: dict[int, set[FileKey]] = {}

    def inject(self, count: int) -> list[tuple[FileKey, int]]:
        """New files with their randomly drawn holders."""
        holders = self.rng.integers(0, len(self.device_ids), size=count)
        files = []
        for slot in holders:
            files.append((file_key(f"file-{self.count}", self.width), self.device_ids[int(slot)]))
            self.count += 1
        return files

    def pick(self, group: int, fresh: Sequence[FileKey]) -> FileKey:
        """
        Key of the next search.

        Three uniforms are drawn on every call so the stream advances the
        same way whichever branch is taken.
        """
        u, v, w = self.rng.random(3)
        history = self.history.get(group, [])
        if u < self.cfg.new_file_fraction or not history:
            return fresh[int(v * len(fresh))]
        return history[int(w * len(history))]

    def searched(self, group: int, key: FileKey) -> None:
        seen = self._seen.setdefault(group, set())
        if key not in seen:
            seen.add(key)
            self.history.setdefault(group, []).append(key)


class _Run:
    def __init__(
        self,
        cfg: SimConfig,
        scenario: Scenario,
        placement: Placement,
        mode: Mode,
        on_lookup: Callable[[int, LookupResult], None] | None,
    ) -> None:
        self.cfg = cfg
        self.topology: Topology = scenario.topology
        self.placement = placement
        self.mode = mode
        self.on_lookup = on_lookup
        self.device_ids = sorted(d.device_id for d in self.topology.devices)
        self.overlay = Overlay(self.topology.widths)
        self.keywords: dict[int, set[int]] = {dev: set() for dev in self.device_ids}
        self.workload = _Workload(cfg, seed_streams(cfg.seed)[WORKLOAD], self.device_ids)
        self._join()
        self.neighbours = self._neighbours() if mode is Mode.D2D_ONLY else {}

    def _join(self) -> None:
        devices = sorted(self.topology.devices, key=lambda d: d.device_id)
        if self.mode is Mode.DHT_D2D:
            for device in devices:
                if device.device_id in self.placement.pilots:
                    self.overlay.add_pilot(device)
        for device in devices:
            pilot = self.placement.attachment[device.device_id] if self.mode is Mode.DHT_D2D else None
            self.overlay.attach(device.device_id, device.position, pilot)

    def _neighbours(self) -> dict[int, tuple[int, ...]]:
        r = self.topology.d2d_range
        positions = {dev: self.topology.device(dev).position for dev in self.device_ids}
        return {
            dev: tuple(other for other in self.device_ids if in_vicinity(positions[other], positions[dev], r))
            for dev in self.device_ids
        }

    def _vicinity(self, dev: int) -> tuple[int, ...]:
        if self.mode is Mode.D2D_ONLY:
            return self.neighbours[dev]
        pilot = self.overlay.pilot_of(dev)
        return self.overlay.vicinity(pilot) if pilot is not None else (dev,)

    def _keyword(self, key: FileKey) -> int:
        return key.key % self.cfg.measurement.n_keywords

    def _hold(self, dev: int, key: FileKey) -> None:
        self.overlay.store(dev, key)
        self.keywords[dev].add(self._keyword(key))

    def _hops(self, a: int, b: int) -> int:
        return d2d_hops(self.topology.device(a).position, self.topology.device(b).position, self.topology.d2d_range)

    def _search(self, dev: int, key: FileKey) -> LookupSample:
        keyword = self._keyword(key)
        nearby = any(keyword in self.keywords[other] for other in self._vicinity(dev))

        if self.mode is Mode.DHT_D2D:
            result = self.overlay.lookup(dev, key)
            if result.found:
                self.overlay.cache_update(result)
                self.keywords[dev].add(keyword)
            pilot = self.overlay.pilot_of(dev)
            pilot_hops = self._hops(dev, pilot) if pilot is not None else None
        else:
            result = self.overlay.direct_lookup(dev, key)
            if result.found:
                self._hold(dev, key)
            pilot_hops = None

        target_hops = self._hops(dev, result.holder) if result.found and result.holder is not None else 0
        return LookupSample(result, target_hops, pilot_hops, nearby)

    def iteration(self, index: int, fresh: list[FileKey]) -> IterationMetrics:
        cfg = self.cfg
        ledger: list[LookupSample] = []
        scores: list[float] = []
        cases: Counter[str] = Counter()
        links: Counter[LinkType] = Counter()

        for dev in self.device_ids:
            group = self.placement.attachment[dev]
            key = self.workload.pick(group, fresh)
            sample = self._search(dev, key)
            self.workload.searched(group, key)

            result = sample.result
            cases[result.case_used.value if result.found else NOT_FOUND] += 1
            links.update(result.links)
            if self.on_lookup is not None:
                self.on_lookup(index, result)

            pct = sample_percentages(sample, cfg.measurement)
            ratings = [rate_percentage(pct[param], cfg.rating) for param in cfg.rated_parameters]
            scores.append(us_overall(ratings))
            ledger.append(sample)

        mean_us = sum(scores) / len(scores)
        max_load = self.placement.max_load if self.mode is Mode.DHT_D2D else 0.0
        logger.info(
            "Iteration %d (%s): mean satisfaction %.4f, %d not found",
            index, self.mode.value, mean_us, cases[NOT_FOUND],
        )
        return IterationMetrics(
            seed=cfg.seed,
            iteration=index,
            mode=self.mode,
            mean_us=mean_us,
            cases=dict(cases),
            links=dict(links),
            max_pilot_load_mb=max_load,
            percentages=parameter_percentages(ledger, cfg.measurement),
        )

    def execute(self) -> RunMetrics:
        for key, holder in self.workload.inject(self.cfg.initial_files):
            self._hold(holder, key)
        iterations = []
        for index in range(1, self.cfg.iterations + 1):
            fresh: list[FileKey] = []
            for key, holder in self.workload.inject(self.cfg.files_per_iter):
                self._hold(holder, key)
                fresh.append(key)
            iterations.append(self.iteration(index, fresh))

        loads = dict(self.placement.loads) if self.mode is Mode.DHT_D2D else {}
        return RunMetrics(
            seed=self.cfg.seed,
            mode=self.mode,
            strategy=self.placement.strategy,
            pilots=self.placement.pilots,
            pilot_loads=loads,
            iterations=tuple(iterations),
        )


def _tagged(
    on_lookup: Callable[[Mode, int, LookupResult], None] | None,
    mode: Mode,
) -> Callable[[int, LookupResult], None] | None:
    if on_lookup is None:
        return None

    def callback(index: int, result: LookupResult) -> None:
        on_lookup(mode, index, result)

    return callback


def _placement(scenario: Scenario, limits: SolverLimits | None) -> Placement:
    cfg = scenario.config
    rng = seed_streams(cfg.seed)[PLACEMENT]
    return place_pilots(scenario.topology, scenario.instance, cfg.strategy, rng, limits)


def run_modes(
    cfg: SimConfig,
    modes: Sequence[Mode],
    *,
    scenario: Scenario | None = None,
    on_lookup: Callable[[Mode, int, LookupResult], None] | None = None,
    limits: SolverLimits | None = None,
) -> list[RunMetrics]:
    """
    Run several modes over one scenario and one pilot placement.

    Both modes draw the same workload stream, so they issue the same
    searches until their holdings diverge.

    Raises:
        InfeasibleInstanceError: the ``pmedian`` placement has no solution.
    """
    if scenario is None:
        scenario = generate_scenario(cfg)
    elif scenario.config != cfg:
        topology = scenario.topology
        scenario = Scenario(topology, build_instance(topology, cfg.n_pilots, cfg.p_cap_mb), cfg)
    placement = _placement(scenario, limits)

    return [_Run(cfg, scenario, placement, mode, _tagged(on_lookup, mode)).execute() for mode in modes]


def run(
    cfg: SimConfig,
    *,
    scenario: Annotated[
        Scenario | None,
        Doc(
            """
            Fixed users and pilot candidates to run on.

            Defaults to a scenario drawn from ``cfg.seed``.
            """
        ),
    ] = None,
    on_lookup: Annotated[
        Callable[[int, LookupResult], None] | None,
        Doc("Called with the iteration index and every completed lookup."),
    ] = None,
    limits: Annotated[
        SolverLimits | None,
        Doc("Solver limits for the ``pmedian`` placement."),
    ] = None,
) -> RunMetrics:
    """Run ``cfg.mode`` for ``cfg.iterations`` iterations; deterministic in ``cfg.seed``."""
    forward = None if on_lookup is None else (lambda _mode, index, result: on_lookup(index, result))
    return run_modes(cfg, (cfg.mode,), scenario=scenario, on_lookup=forward, limits=limits)[0]


def _run_seed(cfg: SimConfig, modes: tuple[Mode, ...], limits: SolverLimits | None) -> list[RunMetrics]:
    return run_modes(cfg, modes, limits=limits)


def run_many(
    cfg: SimConfig,
    seeds: Sequence[int],
    modes: Sequence[Mode] | None = None,
    *,
    workers: int = 1,
    limits: SolverLimits | None = None,
) -> list[RunMetrics]:
    """
    Independent runs for each seed, in seed order then mode order.

    With ``workers > 1`` the seeds fan out over a process pool; the merge
    order does not depend on completion order.
    """
    modes = tuple(modes or (cfg.mode,))
    configs = [cfg.with_overrides(seed=seed) for seed in seeds]
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_seed, configs, [modes] * len(configs), [limits] * len(configs)))
    else:
        batches = [_run_seed(c, modes, limits) for c in configs]
    return [metrics for batch in batches for metrics in batch]
