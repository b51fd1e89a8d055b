"""
Verification check results and reports.
- Max-abs residual checks against a tolerance
- Lower-bound checks (convexity-type inequalities)
- Ratio windows (observed convergence orders)
- Logging of check results
"""

import logging
from dataclasses import dataclass, field
from typing import List, Dict, Any, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

SEVERITIES = ("ERROR", "WARNING", "INFO")


@dataclass
class CheckResult:
    """Single verification check result."""
    check_name: str
    subject: str
    passed: bool
    message: str
    details: Optional[Dict[str, Any]] = None
    severity: str = "ERROR"  # ERROR, WARNING, INFO

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check_name": self.check_name,
            "subject": self.subject,
            "passed": bool(self.passed),
            "message": self.message,
            "severity": self.severity,
            "details": to_jsonable(self.details or {}),
        }


@dataclass
class CheckReport:
    """Aggregated verification report. Only ERROR results gate `passed`."""
    title: str = "VERIFICATION REPORT"
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results if r.severity == "ERROR")

    @property
    def failed_count(self) -> int:
        return sum(1 for r in self.results if not r.passed and r.severity == "ERROR")

    @property
    def passed_count(self) -> int:
        return sum(1 for r in self.results if r.passed)

    def add(self, result: CheckResult) -> None:
        self.results.append(result)
        status = "PASS" if result.passed else "FAIL"
        log_fn = logger.info if result.passed or result.severity != "ERROR" else logger.error
        log_fn(f"[CHECK {status}] {result.subject}: {result.check_name} - {result.message}")

    def extend(self, results: List[CheckResult]) -> None:
        for r in results:
            self.add(r)

    def summary(self) -> str:
        width = max([len(f"{r.subject}.{r.check_name}") for r in self.results] + [20])
        lines = [
            "=" * 60,
            self.title,
            "=" * 60,
            f"Total Checks: {len(self.results)}",
            f"Passed: {self.passed_count}",
            f"Failed: {self.failed_count}",
            "-" * 60,
        ]
        for r in self.results:
            status = "PASS" if r.passed else ("FAIL" if r.severity == "ERROR" else r.severity)
            name = f"{r.subject}.{r.check_name}"
            lines.append(f"[{status:<7}] {name:<{width}}  {r.message}")
        lines.append("=" * 60)
        return "\n".join(lines)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "failed_count": self.failed_count,
            "results": [r.to_dict() for r in self.results],
        }


def to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


# INDIVIDUAL CHECK FUNCTIONS

def check_max_abs(
    values: Any,
    subject: str,
    check_name: str,
    tol: float,
    severity: str = "ERROR",
) -> CheckResult:
    """Check that the largest absolute entry of `values` is within `tol`."""
    arr = np.abs(np.asarray(values, dtype=float))
    worst = float(arr.max()) if arr.size else 0.0
    passed = bool(np.isfinite(worst) and worst <= tol)
    return CheckResult(
        check_name=check_name,
        subject=subject,
        passed=passed,
        message=f"max |residual| = {worst:.3e} (tol: {tol:.1e})",
        details={"max_abs": worst, "tol": tol},
        severity=severity,
    )


def check_lower_bound(
    value: float,
    subject: str,
    check_name: str,
    bound: float,
    severity: str = "ERROR",
) -> CheckResult:
    """Check that `value >= bound`."""
    value = float(value)
    passed = bool(value >= bound)
    return CheckResult(
        check_name=check_name,
        subject=subject,
        passed=passed,
        message=f"value = {value:.3e} (lower bound: {bound:.1e})",
        details={"value": value, "bound": bound},
        severity=severity,
    )


def check_ratio_window(
    numerator: float,
    denominator: float,
    subject: str,
    check_name: str,
    window: Tuple[float, float],
    severity: str = "ERROR",
) -> CheckResult:
    """Check that numerator/denominator lies in a closed window."""
    if denominator == 0.0:
        return CheckResult(
            check_name=check_name,
            subject=subject,
            passed=False,
            message="Ratio undefined (zero denominator)",
            details={"numerator": float(numerator), "denominator": 0.0},
            severity=severity,
        )
    ratio = float(numerator) / float(denominator)
    lo, hi = window
    passed = bool(lo <= ratio <= hi)
    return CheckResult(
        check_name=check_name,
        subject=subject,
        passed=passed,
        message=f"ratio = {ratio:.3f} (window: [{lo}, {hi}])",
        details={"ratio": ratio, "window": list(window)},
        severity=severity,
    )
