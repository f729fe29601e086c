"""Custom exception classes for the library.

This module defines library-specific exceptions that map to process exit
codes when raised through the command-line front end.
"""

from typing import Any, Dict, Optional


class EntropyBoundsException(Exception):
    """Base exception for all library errors.

    Attributes:
        message: Human-readable error message.
        exit_code: Process exit code the CLI returns.
        details: Additional error context.
    """

    def __init__(
        self,
        message: str = "An unexpected error occurred",
        exit_code: int = 1,
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.
            exit_code: Process exit code the CLI returns.
            details: Additional error context.
        """
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class ValidationException(EntropyBoundsException):
    """Raised when an input violates a type invariant."""

    def __init__(
        self,
        message: str = "Validation error",
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Initialize validation exception.

        Args:
            message: Human-readable error message.
            details: Additional error context.
        """
        super().__init__(message=message, exit_code=2, details=details)


class UndefinedConditionalException(ValidationException):
    """Raised when a conditional distribution is requested at a zero-mass x."""

    def __init__(
        self,
        message: str = "Conditional undefined at zero-mass outcome",
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Initialize undefined-conditional exception.

        Args:
            message: Human-readable error message.
            details: Additional error context.
        """
        super().__init__(message=message, details=details)


class NotApplicableException(EntropyBoundsException):
    """Raised when a quantity is undefined for the given inputs.

    Bound evaluators catch this and emit ``applicable=False`` reports.
    """

    def __init__(
        self,
        message: str = "Not applicable",
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        super().__init__(message=message, exit_code=2, details=details)


class NonConvergenceException(EntropyBoundsException):
    """Raised when a numeric solver fails to converge."""

    def __init__(
        self,
        message: str = "Numeric solver did not converge",
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Initialize non-convergence exception.

        Args:
            message: Human-readable error message.
            details: Solver diagnostics (iterations, residual, status).
        """
        super().__init__(message=message, exit_code=3, details=details)


class BoundViolationException(EntropyBoundsException):
    """Raised when a self-checked inequality fails beyond tolerance."""

    def __init__(
        self,
        message: str = "Bound violated",
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        super().__init__(message=message, exit_code=1, details=details)
