from .config import apply_overrides, builtin_scenario, load_config, parse_flat
from .runner import (TELEMETRY_FIELDS, RunResult, RunSummary, TelemetryRecord,
                     compare_controllers, run_scenario, with_controller)
from .scenario import LaneChangePath, RunConfig, Scenario, SteerProfile

__all__ = [
    "apply_overrides", "builtin_scenario", "load_config", "parse_flat",
    "TELEMETRY_FIELDS", "RunResult", "RunSummary", "TelemetryRecord",
    "compare_controllers", "run_scenario", "with_controller",
    "LaneChangePath", "RunConfig", "Scenario", "SteerProfile",
]
