from .checks import (
    CheckOutcome,
    check_distance_comparability,
    check_estimate,
    check_lemma1,
    check_modes_consistency,
    check_section_monotonicity,
    check_tangency,
    comparability_ratios,
    derive_seed,
)
from .report import SCHEMA_VERSION, exit_status_of, run_checks, run_scenario, strip_durations, to_csv, to_json
from .scenario import CheckSpec, Scenario, ScenarioError, load_scenario, parse_scenario

__all__ = [
    "CheckOutcome",
    "CheckSpec",
    "SCHEMA_VERSION",
    "Scenario",
    "ScenarioError",
    "check_distance_comparability",
    "check_estimate",
    "check_lemma1",
    "check_modes_consistency",
    "check_section_monotonicity",
    "check_tangency",
    "comparability_ratios",
    "derive_seed",
    "exit_status_of",
    "load_scenario",
    "parse_scenario",
    "run_checks",
    "run_scenario",
    "strip_durations",
    "to_csv",
    "to_json",
]
