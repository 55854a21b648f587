"""
Response Models

Pydantic models for everything the services report: per-record
diagnostics, inequality and trajectory checks, run summaries and the
HTTP payloads built from them.
"""

from datetime import datetime
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

# Bit-exact CSV header, in order.
CSV_COLUMNS = (
    "t",
    "mass",
    "min_u",
    "max_u",
    "l2_dist",
    "entropy",
    "entropy_dissipation",
    "energy_dissipation",
    "lyapunov",
    "theta_linf",
    "a1_norm",
    "a3_norm",
    "dt_used",
)


class Termination(str, Enum):
    REACHED_T_END = "ReachedTEnd"
    POSITIVITY_VIOLATION = "PositivityViolation"
    SLOPE_BLOWUP = "SlopeBlowup"
    STEP_LIMIT = "StepLimit"


class DiagnosticsRecord(BaseModel):
    """
    One time-slice of every tracked functional.

    Attributes:
        t (float): time of the snapshot
        mass (float): integral of u
        l2_dist (float): L2 distance to the initial mean
        entropy (float): integral of u log u - u + 1
        entropy_dissipation (float): integral of arctan(u_x/u) u_x/u
        energy_dissipation (float): integral of arctan(u_x/u) u_x
        lyapunov (float): integral of u (1 + tan^2 theta)(theta^2/2 + theta^4/4)
        theta_linf (float): sup of |arctan(u_x/u)|
        a1_norm, a3_norm (float): Wiener norms of w = (u - <u0>)/<u0>
        dt_used (float): last step size taken before this record
    """

    t: float
    mass: float
    min_u: float
    max_u: float
    l2_dist: float
    entropy: float
    entropy_dissipation: float
    energy_dissipation: float
    lyapunov: float
    theta_linf: float
    a1_norm: float
    a3_norm: float
    dt_used: float
    slope_linf: float = Field(0.0, description="sup of |u_x| (JSON output only)")
    h2_functional: float = Field(0.0, description="H2-type Lyapunov quantity (JSON output only)")

    def csv_row(self) -> List[float]:
        return [getattr(self, column) for column in CSV_COLUMNS]


class InequalityReport(BaseModel):
    """
    Both sides of a functional inequality. The margin is recorded even
    when negative; callers decide what to assert.
    """

    lhs: float
    rhs: float
    margin: float
    normalized_input: bool = Field(True, description="Input was rescaled to unit mass before evaluation")
    degenerate: bool = Field(False, description="Quotient undefined; limit margin reported")
    signed_lhs: Optional[float] = Field(None, description="Signed-form left side, reported only")

    @classmethod
    def from_sides(cls, lhs: float, rhs: float, **kwargs) -> "InequalityReport":
        return cls(lhs=lhs, rhs=rhs, margin=lhs - rhs, **kwargs)


class BalanceReport(BaseModel):
    entropy_residual: float
    energy_residual: float


class WienerReport(BaseModel):
    """Outcome of the small-data Wiener-space check along a trajectory."""

    precondition_ok: bool
    initial_a1: float
    a1_sup: float
    c: Optional[float] = Field(None, description="6a/(1-4a) with a = sup A1 norm")
    a1_nonincreasing: bool = False
    max_a1_increase: float = 0.0
    max_inequality_defect: Optional[float] = None
    interpolation_ok: bool = True
    a0_norms: List[float] = Field(default_factory=list, description="||w||_A0 at every record")
    a2_norms: List[float] = Field(default_factory=list, description="||w||_A2 at every record")
    passed: bool = False
    reason: Optional[str] = None


class MonotonicityReport(BaseModel):
    """Largest violation of each monotone quantity across consecutive records."""

    slack: float
    violations: Dict[str, float]
    slacks: Dict[str, float] = Field(default_factory=dict, description="Per-quantity slack overriding slack")

    def allowed(self, name: str) -> float:
        return self.slacks.get(name, self.slack)

    @property
    def passed(self) -> bool:
        return all(v <= self.allowed(name) for name, v in self.violations.items())


class SlopeBoundReport(BaseModel):
    bound: float
    max_slope: float
    passed: bool


class TrajectorySummary(BaseModel):
    termination: Termination
    message: Optional[str] = None
    steps: int
    records: int
    final_t: float
    final_mass: float
    relative_mass_drift: float
    final_l2_dist: float
    entropy_residual: Optional[float] = None
    energy_residual: Optional[float] = None
    decay_bound_ok: Optional[bool] = None
    monotone_ok: Optional[bool] = None


class SimulationResponse(BaseModel):
    summary: TrajectorySummary
    records: List[DiagnosticsRecord]
    generated_at: datetime = Field(default_factory=datetime.now)


class FuzzTrial(BaseModel):
    index: int
    seed: int
    margin_1: float
    margin_2: float
    degenerate: bool = False


class FuzzResponse(BaseModel):
    trials: int
    min_margin_1: float
    min_margin_2: float
    tolerance: float
    passed: bool
    failing_seed: Optional[int] = None
    rows: List[FuzzTrial] = Field(default_factory=list)


class PresetInfo(BaseModel):
    name: str
    parameters: List[str]
    constraint: str
    description: str


class ErrorResponse(BaseModel):
    """
    Model for error responses.

    Attributes:
        error (bool): Always True for error responses
        message (str): Human-readable error message
        reason (Optional[str]): Machine-readable failure reason
        status_code (int): HTTP status code
    """

    error: bool = Field(default=True, description="Indicates this is an error response")
    message: str = Field(..., description="Human-readable error message", example="Validation error")
    reason: Optional[str] = Field(None, description="Machine-readable reason", example="positivity_violation")
    status_code: int = Field(..., description="HTTP status code", example=422)


class HealthResponse(BaseModel):
    status: str = Field(..., description="Health status", example="healthy")
    message: str = Field(..., description="Descriptive message about the service status")
    version: str
    timestamp: datetime = Field(default_factory=datetime.now)


class RegularizationLevel(BaseModel):
    level: float = Field(..., description="Common value of epsilon, kappa and delta")
    sup_distance: float = Field(..., description="Sup-distance to the unregularized final state")
    termination: Termination


class RegularizationStudy(BaseModel):
    reference_termination: Termination
    levels: List[RegularizationLevel]
    monotone: bool
    threshold: float
    threshold_ok: bool

    @property
    def passed(self) -> bool:
        return self.monotone and self.threshold_ok


class ResolutionStudy(BaseModel):
    n: int
    n_fine: int
    linf_difference: float
    tolerance: float
    passed: bool
