"""
Diagnostics Service

Functionals, balance laws, inequalities and decay bounds evaluated on
snapshots and on recorded trajectories.

Snapshot functionals (u > 0, s = u_x / u, theta = arctan(s)):

    entropy               H = int u log u - u + 1
    entropy_dissipation   D = int arctan(s) s
    energy_dissipation    D_E = int arctan(s) u_x
    lyapunov              L = int u (1 + s^2)(theta^2/2 + theta^4/4)

Trajectory checks never raise on a failed property; they return reports
and leave the assertion to the caller.
"""

import logging
import math
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from app.errors import DegenerateInput, InsufficientRecords, PreconditionViolated, SlopeBlowup
from app.models.grid import GridFunction
from app.models.response import (
    BalanceReport,
    DiagnosticsRecord,
    InequalityReport,
    MonotonicityReport,
    SlopeBoundReport,
    WienerReport,
)
from app.services.equations import SLOPE_EDGE, require_positive, theta_from_u
from app.services.spectral import (
    derivative,
    derivative_pair,
    mean,
    norm_l2,
    quadrature,
    refine,
    wiener_norm,
)
from app.services.timestep import Trajectory

# Configure logging
logger = logging.getLogger(__name__)

# Poincare constant on the circle of length 2*pi: ||u - <u>||_L2 <= sqrt(2 pi) ||u_x||_L1.
POINCARE_CONSTANT = 1.0 / math.sqrt(2.0 * math.pi)
WIENER_THRESHOLD = 0.1
DEFAULT_SLACK = 1e-8
EXTREMA_SLACK = 1e-9
WIENER_DEFECT_SLACK = 1e-4
DEGENERATE_SEMINORM = 1e-12
THETA_REFINEMENT = 8

MONOTONE_DECREASING = ("entropy", "l2_dist", "lyapunov", "theta_linf", "max_u")
MONOTONE_INCREASING = ("min_u",)
MONOTONE_SLACKS = {"max_u": EXTREMA_SLACK, "min_u": EXTREMA_SLACK}


def _integral(u: GridFunction, density: np.ndarray) -> float:
    return float(u.grid.dx * np.sum(density))


def _slope(u: GridFunction, ux: np.ndarray) -> np.ndarray:
    return ux / u.values


# --------------------------------------------------------------------------
# Snapshot functionals
# --------------------------------------------------------------------------

def entropy(u: GridFunction) -> float:
    require_positive(u, 0.0)
    v = u.values
    return _integral(u, v * np.log(v) - v + 1.0)


def entropy_dissipation(u: GridFunction) -> float:
    require_positive(u, 0.0)
    s = _slope(u, derivative(u, 1).values)
    return _integral(u, np.arctan(s) * s)


def energy_dissipation(u: GridFunction) -> float:
    require_positive(u, 0.0)
    ux = derivative(u, 1).values
    return _integral(u, np.arctan(ux / u.values) * ux)


def _lyapunov_density(v: np.ndarray, s: np.ndarray) -> np.ndarray:
    theta = np.arctan(s)
    return v * (1.0 + s ** 2) * (0.5 * theta ** 2 + 0.25 * theta ** 4)


def lyapunov(u: GridFunction) -> float:
    """1 + tan^2 theta is evaluated as 1 + (u_x/u)^2."""
    require_positive(u, 0.0)
    s = _slope(u, derivative(u, 1).values)
    return _integral(u, _lyapunov_density(u.values, s))


def lyapunov_integrated(u: GridFunction) -> float:
    """int u (1 + s^2)(theta^2 + theta^4), the quantity in the integrated Lyapunov bound."""
    require_positive(u, 0.0)
    s = _slope(u, derivative(u, 1).values)
    theta = np.arctan(s)
    return _integral(u, u.values * (1.0 + s ** 2) * (theta ** 2 + theta ** 4))


def h2_functional(u: GridFunction) -> float:
    """int (u u_xx - u_x^2)^2 / (u (u^2 + u_x^2))."""
    require_positive(u, 0.0)
    v = u.values
    ux, uxx = derivative_pair(u)
    return _integral(u, (v * uxx - ux ** 2) ** 2 / (v * (v ** 2 + ux ** 2)))


def slope_linf(u: GridFunction) -> float:
    return float(np.max(np.abs(derivative(u, 1).values)))


def theta_linf(u: GridFunction, refinement: int = THETA_REFINEMENT) -> float:
    """sup |theta| on the band-limited interpolant of u, sampled ``refinement`` times finer."""
    fine = refine(u, refinement)
    return float(np.max(np.abs(theta_from_u(fine).values)))


# --------------------------------------------------------------------------
# Nonlinear Sobolev inequalities
# --------------------------------------------------------------------------

def _normalize(u: GridFunction) -> Tuple[GridFunction, bool]:
    require_positive(u, 0.0)
    mass = quadrature(u)
    if abs(mass - 1.0) <= 1e-12:
        return u, False
    return u.scaled(1.0 / mass), True


def check_inequality_1(u: GridFunction) -> InequalityReport:
    """
    int arctan(|u_x|/u) |u_x|  >=  arctan(|u|_W11) |u|_W11   for unit-mass u.

    The signed integrand arctan(u_x/u) u_x coincides pointwise (arctan is odd)
    and is reported as ``signed_lhs``.
    """
    un, rescaled = _normalize(u)
    ux = derivative(un, 1).values
    abs_ux = np.abs(ux)
    lhs = _integral(un, np.arctan(abs_ux / un.values) * abs_ux)
    seminorm = _integral(un, abs_ux)
    rhs = math.atan(seminorm) * seminorm
    signed = _integral(un, np.arctan(ux / un.values) * ux)
    return InequalityReport.from_sides(lhs, rhs, normalized_input=rescaled, signed_lhs=signed)


def check_inequality_2(u: GridFunction, strict: bool = True) -> InequalityReport:
    """
    int arctan(|u_x|/u) |u_x|/u  >=  (1/4pi) arctan(X) X,
    X = |u|_W11^2 / || |u_x| u ||_L1,   for unit-mass, non-constant u.

    A constant input has no defined X; the limit margin 0 is reported, and
    with ``strict`` a DegenerateInput carrying that report is raised.
    """
    un, rescaled = _normalize(u)
    ux = derivative(un, 1).values
    abs_ux = np.abs(ux)
    z = abs_ux / un.values
    lhs = _integral(un, np.arctan(z) * z)
    seminorm = _integral(un, abs_ux)
    weighted = _integral(un, abs_ux * un.values)
    if seminorm <= DEGENERATE_SEMINORM or weighted <= 0.0:
        report = InequalityReport(lhs=0.0, rhs=0.0, margin=0.0, normalized_input=rescaled, degenerate=True)
        if strict:
            raise DegenerateInput("constant input: the W11 quotient is undefined", report=report)
        return report
    x = seminorm ** 2 / weighted
    rhs = math.atan(x) * x / (4.0 * math.pi)
    return InequalityReport.from_sides(lhs, rhs, normalized_input=rescaled)


# --------------------------------------------------------------------------
# Decay and balances
# --------------------------------------------------------------------------

def decay_bound(u0: GridFunction, t: float) -> float:
    """
    E0 * exp(-(1/2) * arctan(C E0) / E0 * t),  E0 = ||u0 - <u0>||_L2,
    C = (2 pi)^(-1/2).
    """
    e0 = norm_l2(u0.shifted(-mean(u0)))
    if e0 == 0.0:
        return 0.0
    rate = 0.5 * math.atan(POINCARE_CONSTANT * e0) / e0
    return e0 * math.exp(-rate * t)


def _cumulative_trapezoid(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    increments = 0.5 * np.diff(times) * (values[1:] + values[:-1])
    return np.concatenate(([0.0], np.cumsum(increments)))


def balance_residuals(traj: Trajectory) -> BalanceReport:
    """
    Max-in-time defects of

        H(t) + int_0^t D = H(0)
        (1/2)||u - <u0>||^2 + int_0^t D_E = (1/2)||u0 - <u0>||^2

    with the time integrals taken by the trapezoid rule over records.
    """
    if len(traj) < 3:
        raise InsufficientRecords(f"balance residuals need >= 3 records, got {len(traj)}")
    times = traj.times()
    h = traj.column("entropy")
    d = traj.column("entropy_dissipation")
    energy = 0.5 * traj.column("l2_dist") ** 2
    d_energy = traj.column("energy_dissipation")
    entropy_defect = np.abs(h + _cumulative_trapezoid(d, times) - h[0])
    energy_defect = np.abs(energy + _cumulative_trapezoid(d_energy, times) - energy[0])
    return BalanceReport(
        entropy_residual=float(np.max(entropy_defect)),
        energy_residual=float(np.max(energy_defect)),
    )


def decay_bound_check(traj: Trajectory, tolerance: float = 1e-12) -> Tuple[float, bool]:
    """Largest excess of ||u(t) - <u0>|| over decay_bound(u0, t) across records."""
    u0 = traj.initial_state
    excess = max(
        entry.record.l2_dist - decay_bound(u0, entry.t) for entry in traj.entries
    )
    return float(excess), bool(excess <= tolerance)


# --------------------------------------------------------------------------
# Trajectory-level properties
# --------------------------------------------------------------------------

def monotonicity_report(
    traj: Trajectory,
    slack: float = DEFAULT_SLACK,
    decreasing: Iterable[str] = MONOTONE_DECREASING,
    increasing: Iterable[str] = MONOTONE_INCREASING,
    slacks: Optional[Dict[str, float]] = None,
) -> MonotonicityReport:
    """
    Largest step in the wrong direction for each quantity. ``slacks`` holds
    per-quantity tolerances; the extrema default to the tighter EXTREMA_SLACK.
    """
    violations: Dict[str, float] = {}
    for name in decreasing:
        values = traj.column(name)
        violations[name] = float(np.max(np.diff(values), initial=0.0))
    for name in increasing:
        values = traj.column(name)
        violations[name] = float(np.max(-np.diff(values), initial=0.0))
    per_quantity = dict(MONOTONE_SLACKS if slacks is None else slacks)
    return MonotonicityReport(slack=slack, violations=violations, slacks=per_quantity)


def slope_bound_check(traj: Trajectory, tolerance: float = 1e-9) -> SlopeBoundReport:
    """||u_x(t)||_inf <= ||u0_x||_inf * max u0 / min u0 at every record."""
    u0 = traj.initial_state
    bound = slope_linf(u0) * float(np.max(u0.values)) / float(np.min(u0.values))
    max_slope = float(max(entry.record.slope_linf for entry in traj.entries))
    return SlopeBoundReport(bound=bound, max_slope=max_slope, passed=max_slope <= bound + tolerance)


def lyapunov_integrated_check(traj: Trajectory) -> Tuple[float, bool]:
    """Largest ratio of the integrated Lyapunov quantity to its initial value (bound: 2)."""
    values = [lyapunov_integrated(entry.u) for entry in traj.entries]
    initial = values[0]
    if initial == 0.0:
        worst = max(values)
        return float(worst), bool(worst <= 1e-12)
    ratio = max(values) / initial
    return float(ratio), bool(ratio <= 2.0)


def dissipation_bounds(traj: Trajectory) -> List[Tuple[InequalityReport, InequalityReport]]:
    """Both Sobolev-inequality reports for the unit-mass rescaling of every snapshot."""
    return [
        (check_inequality_1(entry.u), check_inequality_2(entry.u, strict=False))
        for entry in traj.entries
    ]


def wiener_check(
    traj: Trajectory,
    mean_u0: Optional[float] = None,
    slack: float = DEFAULT_SLACK,
    defect_slack: float = WIENER_DEFECT_SLACK,
) -> WienerReport:
    """
    Small-data check in Wiener spaces for w = (u - <u0>) / <u0>.

    Requires ||w0||_A1 < 1/10. Reports whether ||w||_A1 is non-increasing and
    the largest value over interior records of

        <u0> d/dt ||w||_A1 + (1 - c) ||w||_A3,   c = 6a / (1 - 4a),

    with a = sup_t ||w||_A1 and the time derivative a centered difference.
    """
    if len(traj) < 3:
        raise InsufficientRecords(f"wiener check needs >= 3 records, got {len(traj)}")
    if mean_u0 is None:
        mean_u0 = mean(traj.initial_state)

    ws = [entry.u.shifted(-mean_u0).scaled(1.0 / mean_u0) for entry in traj.entries]
    a0 = np.array([wiener_norm(w, 0) for w in ws])
    a1 = np.array([wiener_norm(w, 1) for w in ws])
    a2 = np.array([wiener_norm(w, 2) for w in ws])
    a3 = np.array([wiener_norm(w, 3) for w in ws])
    times = traj.times()

    interpolation_ok = bool(np.all(a1 <= a0 ** (2.0 / 3.0) * a3 ** (1.0 / 3.0) + 1e-14))
    a_sup = float(np.max(a1))
    report = WienerReport(
        precondition_ok=bool(a1[0] < WIENER_THRESHOLD),
        initial_a1=float(a1[0]),
        a1_sup=a_sup,
        interpolation_ok=interpolation_ok,
        a0_norms=a0.tolist(),
        a2_norms=a2.tolist(),
    )
    if not report.precondition_ok:
        violation = PreconditionViolated(
            f"||w0||_A1 = {a1[0]:.6g} >= {WIENER_THRESHOLD}", details={"initial_a1": float(a1[0])}
        )
        report.reason = f"{violation.reason}: {violation.message}"
        logger.warning(f"⚠️ Wiener check: {report.reason}")
        return report

    report.c = 6.0 * a_sup / (1.0 - 4.0 * a_sup)
    increases = np.diff(a1)
    report.max_a1_increase = float(np.max(increases, initial=0.0))
    report.a1_nonincreasing = report.max_a1_increase <= slack

    rate = (a1[2:] - a1[:-2]) / (times[2:] - times[:-2])
    defect = mean_u0 * rate + (1.0 - report.c) * a3[1:-1]
    report.max_inequality_defect = float(np.max(defect))
    report.passed = bool(
        report.c < 1.0 and report.a1_nonincreasing and report.max_inequality_defect <= defect_slack
    )
    if not report.passed:
        report.reason = "a1 increased or the differential inequality failed"
    return report


# --------------------------------------------------------------------------
# Per-record hook used by integrate()
# --------------------------------------------------------------------------

class DiagnosticsRecorder:
    """
    Builds a DiagnosticsRecord for each snapshot. Distances and Wiener norms
    are measured against the initial mean <u0>.
    """

    def __init__(self, u0: GridFunction, theta_refinement: int = THETA_REFINEMENT):
        self.mean_u0 = mean(u0)
        self.theta_refinement = theta_refinement

    def __call__(self, t: float, u: GridFunction, dt_used: float) -> DiagnosticsRecord:
        require_positive(u, 0.0)
        v = u.values
        ux, uxx = derivative_pair(u)
        s = ux / v
        angle = np.arctan(s)
        peak = theta_linf(u, self.theta_refinement)
        if peak >= SLOPE_EDGE:
            raise SlopeBlowup(f"|theta| reached {peak:.9f} at t={t:.6g}", {"theta_linf": peak})
        w = u.shifted(-self.mean_u0).scaled(1.0 / self.mean_u0)
        return DiagnosticsRecord(
            t=t,
            mass=quadrature(u),
            min_u=float(np.min(v)),
            max_u=float(np.max(v)),
            l2_dist=norm_l2(u.shifted(-self.mean_u0)),
            entropy=_integral(u, v * np.log(v) - v + 1.0),
            entropy_dissipation=_integral(u, angle * s),
            energy_dissipation=_integral(u, angle * ux),
            lyapunov=_integral(u, _lyapunov_density(v, s)),
            theta_linf=peak,
            a1_norm=wiener_norm(w, 1),
            a3_norm=wiener_norm(w, 3),
            dt_used=dt_used,
            slope_linf=float(np.max(np.abs(ux))),
            h2_functional=_integral(u, (v * uxx - ux ** 2) ** 2 / (v * (v ** 2 + ux ** 2))),
        )
