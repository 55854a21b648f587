"""
Simulation Service

Turns a validated RunConfig into initial data, integrates it and
summarizes the trajectory. Shared by the ``simulate`` command and the
HTTP route.
"""

import logging
from dataclasses import dataclass

from app.errors import ConfigError, InsufficientRecords
from app.models.grid import Grid, GridFunction
from app.models.request import ModelKind, RunConfig
from app.models.response import SimulationResponse, TrajectorySummary
from app.services import diagnostics
from app.services.config_service import load_initial_data
from app.services.equations import PdeModel
from app.services.spectral import heat_mollify
from app.services.timestep import Trajectory, integrate
from app.services.trialgen import preset

# Configure logging
logger = logging.getLogger(__name__)


@dataclass
class SimulationResult:
    config: RunConfig
    trajectory: Trajectory
    summary: TrajectorySummary

    def to_response(self) -> SimulationResponse:
        return SimulationResponse(summary=self.summary, records=self.trajectory.records)


class SimulationService:
    """Runs single trajectories from RunConfig objects."""

    def prepare_initial_data(self, config: RunConfig) -> GridFunction:
        """
        Sample the preset or load the data file. For the regularized model the
        datum is mollified at time kappa and lifted by delta.
        """
        grid = Grid(config.n)
        if config.initial_data:
            u0 = load_initial_data(config.initial_data, grid)
        else:
            u0 = preset(config.preset, grid)
        if config.model == ModelKind.REGULARIZED:
            if config.kappa > 0:
                u0 = heat_mollify(u0, config.kappa)
            u0 = u0.shifted(config.delta)
        if config.initial_data and float(u0.values.min()) <= config.positivity_floor:
            raise ConfigError(
                f"initial_data: minimum {float(u0.values.min()):.3e} is at or below the "
                f"positivity floor {config.positivity_floor:.1e}",
                field="initial_data",
            )
        return u0

    def run(self, config: RunConfig) -> SimulationResult:
        source = config.initial_data or config.preset
        logger.info(f"🚀 Simulation: model={config.model.value} n={config.n} initial={source}")
        u0 = self.prepare_initial_data(config)
        trajectory = integrate(u0, PdeModel(config.model_params()), config.solver_config())
        summary = summarize(trajectory)
        if trajectory.succeeded:
            logger.info(f"✅ Simulation finished at t={summary.final_t}")
        else:
            logger.warning(f"⚠️ Simulation stopped early: {summary.termination.value}")
        return SimulationResult(config=config, trajectory=trajectory, summary=summary)


def summarize(trajectory: Trajectory) -> TrajectorySummary:
    """Termination, final norms, balance residuals and decay-bound status."""
    if not trajectory.entries:
        return TrajectorySummary(
            termination=trajectory.termination,
            message=trajectory.message,
            steps=trajectory.steps,
            records=0,
            final_t=0.0,
            final_mass=0.0,
            relative_mass_drift=0.0,
            final_l2_dist=0.0,
        )

    first, last = trajectory.records[0], trajectory.records[-1]
    summary = TrajectorySummary(
        termination=trajectory.termination,
        message=trajectory.message,
        steps=trajectory.steps,
        records=len(trajectory),
        final_t=last.t,
        final_mass=last.mass,
        relative_mass_drift=abs(last.mass - first.mass) / abs(first.mass),
        final_l2_dist=last.l2_dist,
    )
    try:
        balances = diagnostics.balance_residuals(trajectory)
        summary.entropy_residual = balances.entropy_residual
        summary.energy_residual = balances.energy_residual
    except InsufficientRecords as e:
        logger.debug(f"balance residuals skipped: {e.message}")
    _, summary.decay_bound_ok = diagnostics.decay_bound_check(trajectory)
    summary.monotone_ok = diagnostics.monotonicity_report(trajectory).passed
    return summary


# Global service instance
simulation_service = SimulationService()


def run_simulation(config: RunConfig) -> SimulationResult:
    return simulation_service.run(config)
