"""
Fuzz Service

Evaluates both nonlinear Sobolev inequalities on a deterministic corpus of
random positive densities. Trial i uses seed seed0 + i, so any failing
trial can be replayed alone.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List

from app.models.grid import Grid
from app.models.request import FuzzConfig
from app.models.response import FuzzResponse, FuzzTrial
from app.services.diagnostics import check_inequality_1, check_inequality_2
from app.services.trialgen import random_positive_density

# Configure logging
logger = logging.getLogger(__name__)


class FuzzService:
    """Runs fuzz campaigns; rows always come back ordered by trial index."""

    def evaluate_trial(self, config: FuzzConfig, index: int) -> FuzzTrial:
        trial = config.trial_config(index)
        u = random_positive_density(trial, Grid(config.n))
        first = check_inequality_1(u)
        second = check_inequality_2(u, strict=False)
        return FuzzTrial(
            index=index,
            seed=trial.seed,
            margin_1=first.margin,
            margin_2=second.margin,
            degenerate=second.degenerate,
        )

    def run(self, config: FuzzConfig) -> FuzzResponse:
        logger.info(
            f"🚀 Fuzzing {config.trials} trials from seed {config.seed0} "
            f"(n={config.n}, K={config.max_mode}, workers={config.workers})"
        )
        indices = range(config.trials)
        if config.workers == 1:
            rows: List[FuzzTrial] = [self.evaluate_trial(config, i) for i in indices]
        else:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                rows = list(pool.map(lambda i: self.evaluate_trial(config, i), indices))

        failing = [row for row in rows if min(row.margin_1, row.margin_2) < -config.tolerance]
        response = FuzzResponse(
            trials=len(rows),
            min_margin_1=min(row.margin_1 for row in rows),
            min_margin_2=min(row.margin_2 for row in rows),
            tolerance=config.tolerance,
            passed=not failing,
            failing_seed=failing[0].seed if failing else None,
            rows=rows,
        )
        if response.passed:
            logger.info(
                f"✅ Fuzz passed: min margins {response.min_margin_1:.3e}, {response.min_margin_2:.3e}"
            )
        else:
            logger.error(f"❌ Fuzz failed on {len(failing)} trial(s); first seed {response.failing_seed}")
        return response


# Global service instance
fuzz_service = FuzzService()


def run_fuzz(config: FuzzConfig) -> FuzzResponse:
    return fuzz_service.run(config)
