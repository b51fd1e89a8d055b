from typing import Optional, Dict, Any


class DynplastError(Exception):
    """Base exception for all simulator and verification errors."""

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        original_error: Optional[Exception] = None
    ):
        super().__init__(message)
        self.message = message
        self.details = details or {}
        self.original_error = original_error

    def __str__(self) -> str:
        if self.details:
            return f"{self.message} | Details: {self.details}"
        return self.message


class ConfigurationError(DynplastError):
    """Exception raised for schema violations and invalid parameters."""

    def __init__(
        self,
        message: str,
        key: Optional[str] = None,
        **kwargs
    ):
        details = kwargs.pop("details", {})
        if key:
            details["key"] = key
        self.key = key
        super().__init__(message, details=details, **kwargs)


class DimensionError(DynplastError):
    """Exception raised when array shapes or tensor dimensions disagree."""

    def __init__(
        self,
        message: str,
        expected: Optional[Any] = None,
        actual: Optional[Any] = None,
        **kwargs
    ):
        details = kwargs.pop("details", {})
        if expected is not None:
            details["expected"] = expected
        if actual is not None:
            details["actual"] = actual
        super().__init__(message, details=details, **kwargs)


class ConvergenceError(DynplastError):
    """Exception raised when an iterative solver hits its iteration cap."""

    def __init__(
        self,
        message: str,
        algorithm: Optional[str] = None,
        iterations: Optional[int] = None,
        achieved: Optional[float] = None,
        **kwargs
    ):
        details = kwargs.pop("details", {})
        if algorithm:
            details["algorithm"] = algorithm
        if iterations is not None:
            details["iterations"] = iterations
        if achieved is not None:
            details["achieved"] = achieved
        super().__init__(message, details=details, **kwargs)


class InitialDataError(DynplastError):
    """Exception raised when initial data violate a compatibility clause."""

    def __init__(
        self,
        message: str,
        clause: Optional[str] = None,
        **kwargs
    ):
        details = kwargs.pop("details", {})
        if clause:
            details["clause"] = clause
        super().__init__(message, details=details, **kwargs)


class MarginViolationError(InitialDataError):
    """Exception raised when the corrected initial stress leaves K."""

    def __init__(
        self,
        message: str,
        cell: Optional[tuple] = None,
        required_lambda: Optional[float] = None,
        **kwargs
    ):
        details = kwargs.pop("details", {})
        if cell is not None:
            details["cell"] = cell
        if required_lambda is not None:
            details["required_lambda"] = required_lambda
        self.cell = cell
        self.required_lambda = required_lambda
        super().__init__(message, clause="margin", details=details, **kwargs)


class LinearSolveError(DynplastError):
    """Exception raised when a sparse linear solve fails."""

    def __init__(
        self,
        message: str,
        residual: Optional[float] = None,
        **kwargs
    ):
        details = kwargs.pop("details", {})
        if residual is not None:
            details["residual"] = residual
        super().__init__(message, details=details, **kwargs)


class StepAbortError(DynplastError):
    """Exception raised when time integration has to stop."""

    def __init__(
        self,
        message: str,
        step: Optional[int] = None,
        reason: Optional[str] = None,
        **kwargs
    ):
        details = kwargs.pop("details", {})
        if step is not None:
            details["step"] = step
        if reason:
            details["reason"] = reason
        super().__init__(message, details=details, **kwargs)


class CFLViolationError(StepAbortError):
    """Exception raised when the timestep exceeds the stability bound."""


class SnapshotIntegrityError(DynplastError):
    """Exception raised for truncated or corrupt run artifacts."""

    def __init__(
        self,
        message: str,
        file_path: Optional[str] = None,
        **kwargs
    ):
        details = kwargs.pop("details", {})
        if file_path:
            details["file_path"] = str(file_path)
        super().__init__(message, details=details, **kwargs)


class ConfigHashMismatchError(DynplastError):
    """Exception raised when an artifact does not belong to its manifest."""

    def __init__(
        self,
        message: str,
        expected: Optional[str] = None,
        actual: Optional[str] = None,
        **kwargs
    ):
        details = kwargs.pop("details", {})
        if expected:
            details["expected"] = expected
        if actual:
            details["actual"] = actual
        super().__init__(message, details=details, **kwargs)


class SweepError(DynplastError):
    """Exception raised for invalid sweeps and failing sweep members."""

    def __init__(
        self,
        message: str,
        lam: Optional[float] = None,
        **kwargs
    ):
        details = kwargs.pop("details", {})
        if lam is not None:
            details["lambda"] = lam
        self.lam = lam
        super().__init__(message, details=details, **kwargs)
