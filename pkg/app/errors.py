"""
Solver Errors

Exception hierarchy shared by the numerical services, the CLI and the HTTP
layer. Every error carries a machine-readable ``reason`` so callers can map
it onto a trajectory termination, an exit code or an HTTP payload.
"""

from typing import Any, Dict, Optional


class SolverError(Exception):
    """Base class for every failure raised by the solver services."""

    reason = "solver_error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"reason": self.reason, "message": self.message, "details": self.details}


class PositivityViolation(SolverError):
    """The solution (or an internal stage) dipped below the positivity floor."""

    reason = "positivity_violation"


class SlopeBlowup(SolverError):
    """The slope angle reached the edge of (-pi/2, pi/2)."""

    reason = "slope_blowup"


class DegenerateInput(SolverError):
    """An inequality quotient is undefined (constant input)."""

    reason = "degenerate_input"

    def __init__(self, message: str, report: Any = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.report = report


class InsufficientRecords(SolverError):
    """A trajectory-level check needs more records than were taken."""

    reason = "insufficient_records"


class PreconditionViolated(SolverError):
    """A smallness hypothesis does not hold for the supplied data."""

    reason = "precondition_violated"


class InvalidPreset(SolverError):
    """Preset name unknown or its parameters break positivity."""

    reason = "invalid_preset"


class ConfigError(SolverError):
    """Configuration could not be parsed or validated."""

    reason = "config_error"

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message, {"field": field} if field else None)
        self.field = field
