"""
Equations Service

Right-hand sides of every evolution equation the solver integrates:

- arctan-fast diffusion   u_t = (u u_xx - u_x^2) / (u^2 + u_x^2)
- logarithmic diffusion   u_t = (u u_xx - u_x^2) / u^2
- nonlocal variant        u_t = d/dx arctan(-H u / u)
- regularized problem     u_t = d/dx J*arctan(d/dx (J*u) / (J*u + eps)) + eps J*d2/dx2 (J*u)

plus the slope-angle formulation theta = arctan(u_x / u) and the equation
for the relative perturbation w = (u - <u0>) / <u0>.

All derivatives are spectral. Every evaluator refuses inputs whose minimum
is at or below the positivity floor.
"""

import logging
import math
from typing import Callable, Dict

import numpy as np

from app.errors import PositivityViolation, SlopeBlowup
from app.models.grid import GridFunction
from app.models.request import ModelKind, ModelParams
from app.services.spectral import derivative, derivative_pair, heat_mollify, hilbert

# Configure logging
logger = logging.getLogger(__name__)

DEFAULT_PARAMS = ModelParams()
SLOPE_EDGE = math.pi / 2 - 1e-6


def require_positive(u: GridFunction, floor: float, what: str = "u") -> None:
    """Raise PositivityViolation when min(u) <= floor."""
    lowest = float(np.min(u.values))
    if lowest <= floor:
        raise PositivityViolation(
            f"min {what} = {lowest:.3e} is at or below the positivity floor {floor:.1e}",
            {"min": lowest, "floor": floor},
        )


def _mollify(f: GridFunction, kappa: float) -> GridFunction:
    return heat_mollify(f, kappa) if kappa > 0 else f


# --------------------------------------------------------------------------
# Right-hand sides
# --------------------------------------------------------------------------

def _flux_derivative(u: GridFunction, flux: np.ndarray) -> GridFunction:
    return derivative(u.like(flux), 1)


def rhs_arctan(u: GridFunction, params: ModelParams = DEFAULT_PARAMS) -> GridFunction:
    """
    Arctan-fast diffusion, evaluated in divergence form d/dx arctan(u_x / u).
    Equal to the quotient (u u_xx - u_x^2) / (u^2 + u_x^2) up to aliasing, and
    its discrete mean is zero, so the semi-discrete flow conserves mass.
    """
    require_positive(u, params.positivity_floor)
    return _flux_derivative(u, np.arctan(derivative(u, 1).values / u.values))


def rhs_log(u: GridFunction, params: ModelParams = DEFAULT_PARAMS) -> GridFunction:
    """Logarithmic fast diffusion u_t = (u_x / u)_x."""
    require_positive(u, params.positivity_floor)
    return _flux_derivative(u, derivative(u, 1).values / u.values)


def rhs_nonlocal(u: GridFunction, params: ModelParams = DEFAULT_PARAMS) -> GridFunction:
    """Nonlocal variant: the inner derivative replaced by -H."""
    require_positive(u, params.positivity_floor)
    return _flux_derivative(u, np.arctan(params.hilbert_sign * (-hilbert(u).values) / u.values))


def rhs_regularized(u: GridFunction, params: ModelParams = DEFAULT_PARAMS) -> GridFunction:
    """
    Regularized approximating problem, composed literally: mollify, lift by
    epsilon, arctan of the quotient, differentiate, mollify again, plus the
    mollified viscosity term. With epsilon = kappa = 0 this is
    d/dx arctan(u_x / u).
    """
    eps, kappa = params.epsilon, params.kappa
    smooth = _mollify(u, kappa)
    require_positive(smooth.shifted(eps), params.positivity_floor, what="mollified u + epsilon")
    smooth_x = derivative(smooth, 1)
    angle = u.like(np.arctan(smooth_x.values / (smooth.values + eps)))
    flux = derivative(_mollify(angle, kappa), 1)
    if eps == 0.0:
        return flux
    viscosity = _mollify(derivative(smooth, 2), kappa)
    return u.like(flux.values + eps * viscosity.values)


# --------------------------------------------------------------------------
# Slope-angle and perturbation formulations
# --------------------------------------------------------------------------

def theta_from_u(u: GridFunction, params: ModelParams = DEFAULT_PARAMS) -> GridFunction:
    """theta = arctan(u_x / u); principal branch since u > 0."""
    require_positive(u, params.positivity_floor)
    return u.like(np.arctan(derivative(u, 1).values / u.values))


def rhs_theta(theta: GridFunction, u: GridFunction, params: ModelParams = DEFAULT_PARAMS) -> GridFunction:
    """
    Time derivative of theta along a solution:

        u (1 + tan^2 theta) theta_t = theta_xx - tan(theta) theta_x

    tan(theta) is taken from u_x / u rather than from the stored angle.
    """
    require_positive(u, params.positivity_floor)
    peak = float(np.max(np.abs(theta.values)))
    if peak >= SLOPE_EDGE:
        raise SlopeBlowup(
            f"|theta| reached {peak:.9f}, too close to pi/2",
            {"theta_linf": peak},
        )
    slope = derivative(u, 1).values / u.values
    theta_x, theta_xx = derivative_pair(theta)
    return theta.like((theta_xx - slope * theta_x) / (u.values * (1.0 + slope ** 2)))


def rhs_wiener(w: GridFunction, mean_u0: float, params: ModelParams = DEFAULT_PARAMS) -> GridFunction:
    """
    Right-hand side for w = (u - <u0>) / <u0>:

        <u0> w_t = (w_xx + w w_xx - w_x^2) / (1 + 2w + w^2 + w_x^2)

    evaluated as <u0> w_t = d/dx arctan(w_x / (1 + w)), so the mean of w is kept.
    """
    if mean_u0 <= 0:
        raise ValueError(f"mean_u0 must be positive, got {mean_u0}")
    require_positive(w.shifted(1.0).scaled(mean_u0), params.positivity_floor)
    flux = np.arctan(derivative(w, 1).values / (1.0 + w.values))
    return _flux_derivative(w, flux).scaled(1.0 / mean_u0)


# --------------------------------------------------------------------------
# Effective diffusivity (for the parabolic step restriction)
# --------------------------------------------------------------------------

def diffusivity(u: GridFunction, params: ModelParams = DEFAULT_PARAMS) -> np.ndarray:
    """
    Pointwise effective diffusivity a(x) of the selected model:

    - arctan_local: u / (u^2 + u_x^2)
    - log_diffusion: 1 / u
    - arctan_nonlocal: u / (u^2 + (H u)^2)
    - regularized: the arctan_local formula on J*u + eps, plus eps
    """
    require_positive(u, params.positivity_floor)
    v = u.values
    if params.kind == ModelKind.ARCTAN_LOCAL:
        ux = derivative(u, 1).values
        return v / (v ** 2 + ux ** 2)
    if params.kind == ModelKind.LOG_DIFFUSION:
        return 1.0 / v
    if params.kind == ModelKind.ARCTAN_NONLOCAL:
        hu = hilbert(u).values
        return v / (v ** 2 + hu ** 2)
    smooth = _mollify(u, params.kappa)
    lifted = smooth.values + params.epsilon
    require_positive(u.like(lifted), params.positivity_floor, what="mollified u + epsilon")
    smooth_x = derivative(smooth, 1).values
    return lifted / (lifted ** 2 + smooth_x ** 2) + params.epsilon


RHS_BY_KIND: Dict[ModelKind, Callable[[GridFunction, ModelParams], GridFunction]] = {
    ModelKind.ARCTAN_LOCAL: rhs_arctan,
    ModelKind.LOG_DIFFUSION: rhs_log,
    ModelKind.ARCTAN_NONLOCAL: rhs_nonlocal,
    ModelKind.REGULARIZED: rhs_regularized,
}


class PdeModel:
    """
    A ModelParams bound to its right-hand side. This is the object the
    time stepper works with.
    """

    def __init__(self, params: ModelParams = DEFAULT_PARAMS):
        self.params = params
        self._rhs = RHS_BY_KIND[params.kind]

    @property
    def kind(self) -> ModelKind:
        return self.params.kind

    def rhs(self, u: GridFunction) -> GridFunction:
        return self._rhs(u, self.params)

    def diffusivity(self, u: GridFunction) -> np.ndarray:
        return diffusivity(u, self.params)

    def __repr__(self) -> str:
        return f"PdeModel(kind={self.kind.value}, eps={self.params.epsilon}, kappa={self.params.kappa})"
