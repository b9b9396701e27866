from .checker import CheckResult, Failure, Finding, SweepResult, check_operation, exhaustive_sweep, run_suite
from .generator import GenConfig, gen_applicable_op, gen_schema
from .preconditions import precondition_holds

__all__ = [
    "CheckResult", "Failure", "Finding", "SweepResult", "check_operation", "exhaustive_sweep", "run_suite",
    "GenConfig", "gen_applicable_op", "gen_schema", "precondition_holds",
]
