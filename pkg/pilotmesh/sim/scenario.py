from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pilotmesh.io import artifact_meta
from pilotmesh.model import ArtifactMeta, Device, IdWidths, Position, ScenarioFile, Topology
from pilotmesh.solver import Instance

from .config import SimConfig

SCENARIO, PLACEMENT, WORKLOAD = range(3)


def seed_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    """Independent generators for topology, pilot placement and workload."""
    scenario, placement, workload = (np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(3))
    return scenario, placement, workload


@dataclass(frozen=True, slots=True, eq=False)
class Scenario:
    topology: Topology
    instance: Instance
    config: SimConfig

    def to_file(self) -> ScenarioFile:
        meta = ArtifactMeta(**artifact_meta(self.config.seed, self.config.model_dump(mode="json")))
        return ScenarioFile.from_topology(self.topology, meta)


def build_instance(topology: Topology, p: int, p_cap: float | None) -> Instance:
    """
    P-median instance over a topology.

    Every device is a member (rows by device id); pilot-eligible devices
    are the candidate columns, also by device id. Distances are Euclidean.
    """
    devices = sorted(topology.devices, key=lambda d: d.device_id)
    eligible = [d for d in devices if d.pilot_eligible]
    members = np.array([(d.position.x, d.position.y) for d in devices])
    sites = np.array([(d.position.x, d.position.y) for d in eligible]).reshape(-1, 2)
    dist = np.hypot(
        members[:, np.newaxis, 0] - sites[np.newaxis, :, 0],
        members[:, np.newaxis, 1] - sites[np.newaxis, :, 1],
    )
    return Instance(
        demands=[float(d.shared_mb) for d in devices],
        pilot_data=[float(d.shared_mb) for d in eligible],
        dist=dist.tolist(),
        P=p,
        P_cap=p_cap,
        member_ids=[d.device_id for d in devices],
        pilot_ids=[d.device_id for d in eligible],
    )


def generate_topology(cfg: SimConfig, rng: np.random.Generator) -> Topology:
    """Users uniform in the cell disc, a random eligible subset, random WiFi uplinks."""
    n = cfg.n_users
    radius = cfg.isd * np.sqrt(rng.random(n))
    angle = 2 * math.pi * rng.random(n)
    shared = rng.integers(0, cfg.max_shared_mb + 1, size=n)
    eligible = set(rng.choice(n, size=cfg.n_eligible, replace=False).tolist())
    eligible_sorted = sorted(eligible)
    n_wifi = round(cfg.wifi_fraction * len(eligible_sorted))
    wifi = set(rng.choice(eligible_sorted, size=n_wifi, replace=False).tolist()) if n_wifi else set()

    devices = tuple(
        Device(
            device_id=i,
            position=Position(float(radius[i] * math.cos(angle[i])), float(radius[i] * math.sin(angle[i]))),
            shared_mb=int(shared[i]),
            pilot_eligible=i in eligible,
            wifi=i in wifi,
        )
        for i in range(n)
    )
    return Topology(isd=cfg.isd, d2d_range=cfg.d2d_range, devices=devices, widths=IdWidths(*cfg.id_widths))


def generate_scenario(cfg: SimConfig) -> Scenario:
    """Deterministic in ``cfg.seed``."""
    rng = seed_streams(cfg.seed)[SCENARIO]
    topology = generate_topology(cfg, rng)
    return Scenario(topology, build_instance(topology, cfg.n_pilots, cfg.p_cap_mb), cfg)


def scenario_from_file(scenario: ScenarioFile, cfg: SimConfig | None = None) -> Scenario:
    """Rebuild a scenario; the embedded config is used unless ``cfg`` is given."""
    if cfg is None:
        embedded = scenario.meta.config if scenario.meta is not None else {}
        cfg = SimConfig.model_validate(embedded) if embedded else SimConfig()
    topology = scenario.to_topology()
    cfg = cfg.with_overrides(
        isd=topology.isd,
        d2d_range=topology.d2d_range,
        n_users=len(topology.devices),
        id_widths=topology.widths.as_tuple(),
    )
    return Scenario(topology, build_instance(topology, cfg.n_pilots, cfg.p_cap_mb), cfg)
