import numpy as np
import pytest

from app.errors import SlopeBlowup
from app.models.grid import Grid
from app.models.request import ModelParams, SolverConfig
from app.models.response import Termination
from app.services.diagnostics import DiagnosticsRecorder
from app.services.equations import PdeModel
from app.services.spectral import quadrature
from app.services.timestep import SolverState, Trajectory, integrate, stable_dt, step_rk4
from tests.conftest import run_preset


class DrainModel(PdeModel):
    """u_t = -1: loses positivity at t = min u0."""

    def rhs(self, u):
        return u.like(-np.ones(u.n))

    def diffusivity(self, u):
        return np.ones(u.n)


def test_stable_dt_for_constant_state(grid64):
    u = grid64.constant(2.0)
    # arctan diffusivity of a constant c is 1/c
    assert stable_dt(u, PdeModel(), 0.5) == pytest.approx(0.5 * grid64.dx ** 2)


def test_rk4_step_keeps_constants(grid64):
    state = SolverState(t=0.0, u=grid64.constant(1.0))
    after = step_rk4(state, PdeModel(), 1e-3)
    np.testing.assert_allclose(after.u.values, 1.0, atol=1e-15)
    assert after.t == pytest.approx(1e-3)
    assert after.step_count == 1
    assert after.last_dt == 1e-3


def test_records_land_on_multiples_of_record_every(cosine_run):
    assert cosine_run.succeeded
    times = cosine_run.times()
    assert len(cosine_run) == 51
    np.testing.assert_allclose(times, 0.01 * np.arange(51), atol=1e-15)
    assert times[-1] == 0.5
    assert cosine_run.records[0].dt_used == 0.0
    assert all(r.dt_used > 0 for r in cosine_run.records[1:])


def test_final_record_at_t_end_when_not_a_multiple():
    traj = run_preset("cosine_bump(0.5)", n=16, t_end=0.035, record_every=0.01)
    np.testing.assert_allclose(traj.times(), [0.0, 0.01, 0.02, 0.03, 0.035], atol=1e-15)


def test_mass_is_conserved(cosine_run):
    mass = cosine_run.column("mass")
    assert np.max(np.abs(mass - mass[0])) / mass[0] < 1e-10


def test_constant_datum_stays_constant():
    traj = run_preset("constant", n=16, t_end=0.1, record_every=0.05)
    assert traj.succeeded
    for entry in traj.entries:
        np.testing.assert_allclose(entry.u.values, 1.0, atol=1e-14)


def test_positivity_loss_ends_the_run_and_keeps_records():
    grid = Grid(8)
    config = SolverConfig(t_end=2.0, record_every=0.1)
    traj = integrate(grid.constant(1.0), DrainModel(), config)
    assert traj.termination == Termination.POSITIVITY_VIOLATION
    assert traj.message
    assert len(traj) >= 9
    assert traj.times()[-1] <= 1.0 + 1e-12


def test_non_positive_initial_data_stops_immediately(grid64):
    u0 = grid64.sample(lambda x: 1.0 + np.cos(x))
    traj = integrate(u0, PdeModel(), SolverConfig(t_end=0.1))
    assert traj.termination == Termination.POSITIVITY_VIOLATION
    assert len(traj) == 0
    with pytest.raises(IndexError):
        traj.final_state()


def test_step_limit():
    u0 = Grid(32).sample(lambda x: 1.0 + 0.5 * np.cos(x))
    traj = integrate(u0, PdeModel(), SolverConfig(t_end=1.0, max_steps=5))
    assert traj.termination == Termination.STEP_LIMIT
    assert traj.steps == 5
    assert not traj.succeeded


def test_slope_blowup_from_the_diagnostics_hook(grid64):
    u0 = grid64.sample(lambda x: 1.0 + 0.5 * np.cos(x))
    recorder = DiagnosticsRecorder(u0)

    def hook(t, u, dt_used):
        if t > 0.015:
            raise SlopeBlowup("forced")
        return recorder(t, u, dt_used)

    traj = integrate(u0, PdeModel(), SolverConfig(t_end=0.1, record_every=0.01), diag=hook)
    assert traj.termination == Termination.SLOPE_BLOWUP
    assert traj.message == "forced"
    np.testing.assert_allclose(traj.times(), [0.0, 0.01])


def test_trajectory_helpers(cosine_run):
    assert cosine_run.initial_state.n == 64
    assert quadrature(cosine_run.final_state()) == pytest.approx(cosine_run.records[-1].mass)
    assert cosine_run.column("t")[-1] == 0.5
    assert Trajectory().succeeded


def test_integration_is_deterministic():
    first = run_preset("two_mode(0.3, 0.2)", n=32, t_end=0.05)
    second = run_preset("two_mode(0.3, 0.2)", n=32, t_end=0.05)
    assert [r.csv_row() for r in first.records] == [r.csv_row() for r in second.records]


def test_other_models_integrate():
    for kind, extra in (
        ("log_diffusion", {}),
        ("arctan_nonlocal", {}),
        ("regularized", {"epsilon": 1e-3, "kappa": 1e-3}),
    ):
        traj = run_preset("cosine_bump(0.3)", n=32, t_end=0.05, kind=kind, **extra)
        assert traj.succeeded, kind
        mass = traj.column("mass")
        assert abs(mass[-1] - mass[0]) < 1e-10, kind


def test_model_params_round_trip_through_pde_model():
    params = ModelParams(kind="regularized", epsilon=1e-3, kappa=1e-3)
    assert PdeModel(params).params is params


def test_stable_dt_scales_with_grid_spacing_squared():
    steps = [stable_dt(Grid(n).sample(lambda x: 1.0 + 0.5 * np.cos(x)), PdeModel(), 0.25) for n in (32, 64, 128)]
    assert steps[0] / steps[1] == pytest.approx(4.0, rel=1e-2)
    assert steps[1] / steps[2] == pytest.approx(4.0, rel=1e-2)


def test_rk4_is_fourth_order_under_step_doubling():
    u0 = Grid(16).sample(lambda x: 1.0 + 0.5 * np.cos(x))
    model = PdeModel()

    def advance(dt, t_end=0.08):
        state = SolverState(t=0.0, u=u0)
        for _ in range(int(round(t_end / dt))):
            state = step_rk4(state, model, dt)
        return state.u.values

    coarse, mid, fine = advance(0.002), advance(0.001), advance(0.0005)
    ratio = np.max(np.abs(coarse - mid)) / np.max(np.abs(mid - fine))
    assert 13.0 < ratio < 19.0


@pytest.mark.parametrize("name", ["two_mode(0.5, 0.4)", "cosine_bump(0.9)"])
def test_mass_drift_on_rough_data_at_low_resolution(name):
    traj = run_preset(name, n=64, t_end=0.5, record_every=0.05)
    assert traj.succeeded
    mass = traj.column("mass")
    assert np.max(np.abs(mass - mass[0])) / mass[0] <= 1e-8
