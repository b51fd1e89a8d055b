from dynplast.common.quality_checks import (
    CheckResult,
    CheckReport,
    check_max_abs,
    check_lower_bound,
    check_ratio_window,
)
from dynplast.common.exceptions import (
    DynplastError,
    ConfigurationError,
    DimensionError,
    ConvergenceError,
    InitialDataError,
    MarginViolationError,
    LinearSolveError,
    StepAbortError,
    CFLViolationError,
    SnapshotIntegrityError,
    ConfigHashMismatchError,
    SweepError,
)
from dynplast.common.logging import bind_run_context, configure_logging, create_run_log_file

__all__ = [
    # Checks
    "CheckResult",
    "CheckReport",
    "check_max_abs",
    "check_lower_bound",
    "check_ratio_window",
    # Exceptions
    "DynplastError",
    "ConfigurationError",
    "DimensionError",
    "ConvergenceError",
    "InitialDataError",
    "MarginViolationError",
    "LinearSolveError",
    "StepAbortError",
    "CFLViolationError",
    "SnapshotIntegrityError",
    "ConfigHashMismatchError",
    "SweepError",
    # Logging
    "bind_run_context",
    "configure_logging",
    "create_run_log_file",
]
