"""Voltage regulation on radial feeders with V2G hub dispatch."""

__version__ = "0.1.0"

from .env import EnvConfig, StepResult, V2GEnv, reward_from_voltages
from .grid import (
    Feeder,
    FeederFormatError,
    FeederTopologyError,
    PowerFlowSolution,
    load_feeder,
    load_feeder_file,
    solve_power_flow,
)
from .scenario import Scenario, build_fleets, load_scenario

__all__ = [
    "__version__",
    "Feeder",
    "FeederFormatError",
    "FeederTopologyError",
    "PowerFlowSolution",
    "load_feeder",
    "load_feeder_file",
    "solve_power_flow",
    "EnvConfig",
    "StepResult",
    "V2GEnv",
    "reward_from_voltages",
    "Scenario",
    "load_scenario",
    "build_fleets",
]
