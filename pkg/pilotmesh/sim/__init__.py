from .config import MeasurementPolicy, Mode, RadioConfig, SimConfig, Strategy
from .measure import LookupSample, energy_units, parameter_percentages, sample_percentages
from .placement import Placement, place_pilots
from .runner import CASE_COLUMNS, METRIC_COLUMNS, IterationMetrics, RunMetrics, run, run_many, run_modes
from .scenario import Scenario, build_instance, generate_scenario, generate_topology, scenario_from_file, seed_streams

__all__ = (
    "CASE_COLUMNS",
    "METRIC_COLUMNS",
    "IterationMetrics",
    "LookupSample",
    "MeasurementPolicy",
    "Mode",
    "Placement",
    "RadioConfig",
    "RunMetrics",
    "Scenario",
    "SimConfig",
    "Strategy",
    "build_instance",
    "energy_units",
    "generate_scenario",
    "generate_topology",
    "parameter_percentages",
    "place_pilots",
    "run",
    "run_many",
    "run_modes",
    "sample_percentages",
    "scenario_from_file",
    "seed_streams",
)
