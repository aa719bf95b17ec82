from .oracle import OracleVerdict, consistency_oracle
from .scenario import Scenario, ScenarioConfig, parse_scenario, run_scenario
from .signals import build_profile_drivers, simulated_driver

__all__ = [
    "OracleVerdict",
    "Scenario",
    "ScenarioConfig",
    "build_profile_drivers",
    "consistency_oracle",
    "parse_scenario",
    "run_scenario",
    "simulated_driver",
]
