"""
Time Stepping Service

Method-of-lines integration: classical RK4 with a parabolic CFL step
derived from the model's effective diffusivity, positivity checks on every
internal stage, and diagnostics sampled at fixed multiples of
``record_every`` independently of the step size.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from app.errors import PositivityViolation, SlopeBlowup, SolverError
from app.models.grid import GridFunction
from app.models.request import SolverConfig
from app.models.response import DiagnosticsRecord, Termination
from app.services.equations import PdeModel, require_positive

# Configure logging
logger = logging.getLogger(__name__)

DiagnosticsHook = Callable[[float, GridFunction, float], DiagnosticsRecord]

# A record boundary closer than this fraction of record_every to t_end is merged into t_end.
_BOUNDARY_MERGE = 1e-9


@dataclass(frozen=True)
class SolverState:
    t: float
    u: GridFunction
    step_count: int = 0
    last_dt: float = 0.0


@dataclass(frozen=True)
class TrajectoryEntry:
    t: float
    u: GridFunction
    record: DiagnosticsRecord


@dataclass
class Trajectory:
    """Recorded snapshots plus the reason the run stopped."""

    entries: List[TrajectoryEntry] = field(default_factory=list)
    termination: Termination = Termination.REACHED_T_END
    message: Optional[str] = None
    steps: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def records(self) -> List[DiagnosticsRecord]:
        return [entry.record for entry in self.entries]

    def times(self) -> np.ndarray:
        return np.array([entry.t for entry in self.entries])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(entry.record, name) for entry in self.entries])

    def final_state(self) -> GridFunction:
        if not self.entries:
            raise IndexError("trajectory has no records")
        return self.entries[-1].u

    @property
    def initial_state(self) -> GridFunction:
        if not self.entries:
            raise IndexError("trajectory has no records")
        return self.entries[0].u

    @property
    def succeeded(self) -> bool:
        return self.termination == Termination.REACHED_T_END


def stable_dt(u: GridFunction, model: PdeModel, cfl: float) -> float:
    """dt = cfl * dx^2 / (2 max a) for the model's effective diffusivity a."""
    a_max = float(np.max(model.diffusivity(u)))
    return cfl * u.grid.dx ** 2 / (2.0 * a_max)


def step_rk4(
    state: SolverState,
    model: PdeModel,
    dt: float,
    positivity_floor: Optional[float] = None,
) -> SolverState:
    """One classical Runge-Kutta step; every stage and the result must stay positive."""
    floor = model.params.positivity_floor if positivity_floor is None else positivity_floor
    u = state.u
    require_positive(u, floor)

    k1 = model.rhs(u).values
    stage = u.like(u.values + 0.5 * dt * k1)
    require_positive(stage, floor, what="u at RK stage 2")
    k2 = model.rhs(stage).values
    stage = u.like(u.values + 0.5 * dt * k2)
    require_positive(stage, floor, what="u at RK stage 3")
    k3 = model.rhs(stage).values
    stage = u.like(u.values + dt * k3)
    require_positive(stage, floor, what="u at RK stage 4")
    k4 = model.rhs(stage).values

    result = u.like(u.values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    require_positive(result, floor, what="u after step")
    return SolverState(t=state.t + dt, u=result, step_count=state.step_count + 1, last_dt=dt)


def _record_time(index: int, config: SolverConfig) -> float:
    boundary = index * config.record_every
    if boundary >= config.t_end or config.t_end - boundary < _BOUNDARY_MERGE * config.record_every:
        return config.t_end
    return boundary


def integrate(
    u0: GridFunction,
    model: PdeModel,
    config: SolverConfig,
    diag: Optional[DiagnosticsHook] = None,
) -> Trajectory:
    """
    Integrate from u0 to config.t_end.

    Never raises for solver breakdowns: the returned Trajectory carries the
    termination reason and every record taken before it.
    """
    if diag is None:
        from app.services.diagnostics import DiagnosticsRecorder

        diag = DiagnosticsRecorder(u0)

    trajectory = Trajectory()
    logger.info(f"🚀 Integrating {model!r} | n={u0.n} t_end={config.t_end} cfl={config.cfl}")

    try:
        require_positive(u0, config.positivity_floor)
        trajectory.entries.append(TrajectoryEntry(0.0, u0, diag(0.0, u0, 0.0)))
    except SolverError as e:
        return _terminate(trajectory, e)

    state = SolverState(t=0.0, u=u0)
    record_index = 1
    boundary = _record_time(record_index, config)

    while state.t < config.t_end:
        if state.step_count >= config.max_steps:
            trajectory.termination = Termination.STEP_LIMIT
            trajectory.message = f"step limit {config.max_steps} reached at t={state.t:.6g}"
            logger.warning(f"⚠️ {trajectory.message}")
            break
        try:
            dt = min(stable_dt(state.u, model, config.cfl), boundary - state.t)
            state = step_rk4(state, model, dt, config.positivity_floor)
            if state.t >= boundary or boundary - state.t <= 1e-14 * max(boundary, 1.0):
                state = SolverState(t=boundary, u=state.u, step_count=state.step_count, last_dt=dt)
                trajectory.entries.append(
                    TrajectoryEntry(boundary, state.u, diag(boundary, state.u, dt))
                )
                logger.debug(f"record t={boundary:.6g} steps={state.step_count}")
                record_index += 1
                boundary = _record_time(record_index, config)
        except SolverError as e:
            trajectory.steps = state.step_count
            return _terminate(trajectory, e)

    trajectory.steps = state.step_count
    if trajectory.termination == Termination.REACHED_T_END:
        logger.info(f"✅ Reached t={config.t_end} in {state.step_count} steps ({len(trajectory)} records)")
    return trajectory


def _terminate(trajectory: Trajectory, error: SolverError) -> Trajectory:
    if isinstance(error, SlopeBlowup):
        trajectory.termination = Termination.SLOPE_BLOWUP
    elif isinstance(error, PositivityViolation):
        trajectory.termination = Termination.POSITIVITY_VIOLATION
    else:
        raise error
    trajectory.message = error.message
    logger.error(f"❌ Run stopped: {trajectory.termination.value}: {error.message}")
    return trajectory
