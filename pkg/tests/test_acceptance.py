"""End-to-end runs at the resolutions the solver is expected to handle on a desk machine."""

import math

import numpy as np
import pytest

from app.models.request import FuzzConfig, StudyConfig
from app.services import diagnostics
from app.services.fuzz_service import run_fuzz
from app.services.study_service import study_service
from tests.conftest import run_preset

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def bump_run():
    return run_preset("cosine_bump(0.5)", n=256, t_end=1.0, record_every=1e-3)


@pytest.fixture(scope="module")
def bump_run_fine():
    return run_preset("cosine_bump(0.5)", n=256, t_end=1.0, record_every=5e-4)


def test_inequality_fuzz_campaign():
    response = run_fuzz(FuzzConfig(trials=10_000, n=512, max_mode=32))
    assert response.passed
    assert response.min_margin_1 >= -1e-10
    assert response.min_margin_2 >= -1e-10


def test_mass_conservation(bump_run):
    assert bump_run.succeeded
    mass = bump_run.column("mass")
    assert np.max(np.abs(mass - mass[0])) / mass[0] <= 1e-8


def test_maximum_principle(bump_run):
    assert np.max(np.diff(bump_run.column("max_u"))) <= 1e-9
    assert np.max(-np.diff(bump_run.column("min_u"))) <= 1e-9


def test_entropy_and_energy_balances(bump_run, bump_run_fine):
    coarse = diagnostics.balance_residuals(bump_run)
    fine = diagnostics.balance_residuals(bump_run_fine)
    assert coarse.entropy_residual <= 1e-6
    assert coarse.energy_residual <= 1e-6
    assert coarse.entropy_residual / fine.entropy_residual >= 3.0
    assert coarse.energy_residual / fine.energy_residual >= 3.0


@pytest.mark.parametrize("a", [0.1, 0.3, 0.5])
def test_energy_decay_bound(a):
    traj = run_preset(f"cosine_bump({a})", n=64, t_end=2.0, record_every=0.01)
    assert traj.succeeded
    excess, ok = diagnostics.decay_bound_check(traj)
    assert ok, excess


def test_slope_bound_and_lyapunov_decay():
    traj = run_preset("exp_sin(1)", n=64, t_end=1.0, record_every=0.01)
    assert traj.succeeded
    assert traj.records[0].theta_linf == pytest.approx(math.pi / 4, abs=1e-10)
    report = diagnostics.monotonicity_report(traj, decreasing=("theta_linf", "lyapunov"), increasing=())
    assert report.passed, report.violations
    assert diagnostics.slope_bound_check(traj).passed
    _, ok = diagnostics.lyapunov_integrated_check(traj)
    assert ok


def test_wiener_regime():
    traj = run_preset("wiener_small(0.05)", n=64, t_end=1.0, record_every=0.01)
    report = diagnostics.wiener_check(traj)
    assert report.passed, report.reason
    assert report.max_a1_increase <= 1e-8
    assert report.max_inequality_defect <= 1e-4

    large = diagnostics.wiener_check(run_preset("cosine_bump(0.3)", n=64, t_end=0.1, record_every=0.01))
    assert not large.precondition_ok


def test_regularized_scheme_converges():
    study = study_service.regularization(
        StudyConfig(preset="cosine_bump(0.5)", n=128, t_end=0.25, levels=[1e-2, 1e-3, 1e-4], threshold=1e-3)
    )
    assert study.monotone, [row.sup_distance for row in study.levels]
    assert study.threshold_ok


def test_solver_self_convergence():
    study = study_service.resolution(
        StudyConfig(preset="cosine_bump(0.5)", n=256, t_end=0.5, resolution_tolerance=1e-7)
    )
    assert study.passed, study.linf_difference
