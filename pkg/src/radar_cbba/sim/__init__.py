from .render import render_snapshot
from .runner import (
    COMPARISON_HEADER,
    METRICS_HEADER,
    ComparisonRow,
    RunResult,
    StepMetrics,
    build_instance,
    claimed_assignment,
    compare_centralized,
    run,
)
from .scenario import RadarSpec, Scenario, ScenarioError, TargetSpec, World, generate_scenario

__all__ = [
    "COMPARISON_HEADER", "METRICS_HEADER", "ComparisonRow", "RadarSpec", "RunResult", "Scenario",
    "ScenarioError", "StepMetrics", "TargetSpec", "World", "build_instance", "claimed_assignment",
    "compare_centralized", "generate_scenario", "render_snapshot", "run",
]
