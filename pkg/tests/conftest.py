import logging

import pytest

from pilotmesh.model import Device, Position, Topology
from pilotmesh.overlay import Overlay
from pilotmesh.sim import SimConfig
from pilotmesh.solver import Instance

logger = logging.getLogger("test")


@pytest.fixture
def tiny_instance() -> Instance:
    """Three members, two candidate pilots a and b; opening a costs 70, b costs 110."""
    return Instance(
        demands=[10, 10, 10],
        pilot_data=[10, 10],
        dist=[[1, 5], [1, 5], [5, 1]],
        P=1,
        P_cap=1000,
    )


@pytest.fixture
def uncapacitated_instance() -> Instance:
    """Two pilots to open out of two; every member has an obvious nearest pilot."""
    return Instance(
        demands=[10, 10, 10],
        pilot_data=[10, 10],
        dist=[[1, 5], [1, 5], [5, 1]],
        P=2,
    )


@pytest.fixture
def line_topology() -> Topology:
    """
    Five devices on the x axis of a 250 m cell with 20 m D2D range.

    Devices 0 and 2 are pilot eligible. Device 1 sits 10 m from 0,
    device 3 sits 10 m from 2 and device 4 is out of every pilot's reach.
    """
    devices = (
        Device(0, Position(0.0, 0.0), shared_mb=100, pilot_eligible=True),
        Device(1, Position(10.0, 0.0), shared_mb=50),
        Device(2, Position(100.0, 0.0), shared_mb=80, pilot_eligible=True),
        Device(3, Position(110.0, 0.0), shared_mb=40),
        Device(4, Position(200.0, 0.0), shared_mb=10),
    )
    return Topology(isd=250.0, d2d_range=20.0, devices=devices)


@pytest.fixture
def overlay(line_topology) -> Overlay:
    """Pilots 0 and 2 in region 1, members registered in id order."""
    topology = line_topology.with_pilots((0, 2))
    ov = Overlay(topology.widths)
    for device in sorted(topology.devices, key=lambda d: d.device_id):
        ov.register(device, topology)
    return ov


@pytest.fixture
def small_config() -> SimConfig:
    """A quick 20-user, 3-pilot experiment."""
    return SimConfig(
        n_users=20,
        n_pilots=3,
        initial_files=40,
        files_per_iter=20,
        iterations=3,
        seed=11,
    )
