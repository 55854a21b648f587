import math

import numpy as np
import pytest

from app.models.grid import Grid
from app.models.request import ModelKind, ModelParams, SolverConfig
from app.services.equations import PdeModel
from app.services.timestep import integrate
from app.services.trialgen import preset


@pytest.fixture
def grid64():
    return Grid(64)


@pytest.fixture
def grid128():
    return Grid(128)


@pytest.fixture
def cosine_bump(grid64):
    return grid64.sample(lambda x: 1.0 + 0.5 * np.cos(x))


def run_preset(
    name: str,
    n: int = 64,
    t_end: float = 0.2,
    record_every: float = 0.01,
    cfl: float = 0.25,
    kind: ModelKind = ModelKind.ARCTAN_LOCAL,
    **params,
):
    """Integrate a preset with the default diagnostics recorder."""
    u0 = preset(name, Grid(n))
    model = PdeModel(ModelParams(kind=kind, **params))
    config = SolverConfig(cfl=cfl, t_end=t_end, record_every=record_every)
    return integrate(u0, model, config)


@pytest.fixture(scope="session")
def cosine_run():
    """cosine_bump(0.5) at n = 64 up to t = 0.5, shared by read-only tests."""
    return run_preset("cosine_bump(0.5)", n=64, t_end=0.5, record_every=0.01)


TWO_PI = 2.0 * math.pi
