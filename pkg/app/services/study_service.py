"""
Study Service

Convergence studies behind the ``converge`` command:

- regularization: final states of the regularized problem with
  epsilon = kappa = delta = level approach the unregularized final state as
  the level decreases;
- resolution: doubling n (with the CFL number halved) changes the final
  state by less than a tolerance on the coarse grid points.
"""

import logging
from typing import Optional

import numpy as np

from app.models.grid import Grid, GridFunction
from app.models.request import ModelKind, ModelParams, SolverConfig, StudyConfig
from app.models.response import (
    RegularizationLevel,
    RegularizationStudy,
    ResolutionStudy,
)
from app.services.equations import PdeModel
from app.services.spectral import heat_mollify
from app.services.timestep import Trajectory, integrate
from app.services.trialgen import preset

# Configure logging
logger = logging.getLogger(__name__)


def _final_state(trajectory: Trajectory) -> Optional[GridFunction]:
    return trajectory.final_state() if trajectory.succeeded else None


class StudyService:
    def _solve(self, u0: GridFunction, params: ModelParams, config: StudyConfig, cfl: float) -> Trajectory:
        solver = SolverConfig(cfl=cfl, t_end=config.t_end, record_every=config.t_end)
        return integrate(u0, PdeModel(params), solver)

    def regularization(self, config: StudyConfig) -> RegularizationStudy:
        grid = Grid(config.n)
        u0 = preset(config.preset, grid)
        logger.info(f"🚀 Regularization study on {config.preset}, levels {config.levels}")

        reference = self._solve(u0, ModelParams(kind=ModelKind.ARCTAN_LOCAL), config, config.cfl)
        u_ref = _final_state(reference)

        rows = []
        for level in config.levels:
            params = ModelParams(kind=ModelKind.REGULARIZED, epsilon=level, kappa=level)
            lifted = heat_mollify(u0, level).shifted(level)
            run = self._solve(lifted, params, config, config.cfl)
            u_final = _final_state(run)
            if u_ref is None or u_final is None:
                distance = float("inf")
            else:
                distance = float(np.max(np.abs(u_final.values - u_ref.values)))
            rows.append(RegularizationLevel(level=level, sup_distance=distance, termination=run.termination))
            logger.info(f"level {level:g}: sup distance {distance:.3e}")

        distances = [row.sup_distance for row in rows]
        study = RegularizationStudy(
            reference_termination=reference.termination,
            levels=rows,
            monotone=all(b < a for a, b in zip(distances, distances[1:])),
            threshold=config.threshold,
            threshold_ok=distances[-1] <= config.threshold,
        )
        if not study.passed:
            logger.warning("⚠️ Regularization study did not converge monotonically below the threshold")
        return study

    def resolution(self, config: StudyConfig) -> ResolutionStudy:
        coarse_grid, fine_grid = Grid(config.n), Grid(2 * config.n)
        logger.info(f"🚀 Resolution study on {config.preset}: n={config.n} vs n={2 * config.n}")
        params = ModelParams(kind=ModelKind.ARCTAN_LOCAL)
        coarse = self._solve(preset(config.preset, coarse_grid), params, config, config.cfl)
        fine = self._solve(preset(config.preset, fine_grid), params, config, 0.5 * config.cfl)

        u_coarse, u_fine = _final_state(coarse), _final_state(fine)
        if u_coarse is None or u_fine is None:
            difference = float("inf")
        else:
            # coarse grid points are the even-indexed fine grid points
            difference = float(np.max(np.abs(u_fine.values[::2] - u_coarse.values)))
        return ResolutionStudy(
            n=config.n,
            n_fine=2 * config.n,
            linf_difference=difference,
            tolerance=config.resolution_tolerance,
            passed=difference <= config.resolution_tolerance,
        )


# Global service instance
study_service = StudyService()
