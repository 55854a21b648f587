"""
Request Models

Pydantic models for every configuration object accepted by the services,
the CLI and the HTTP routes. Validation here is the single place where
user-supplied parameters are checked.
"""

import re
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, root_validator, validator

from app.models.grid import MIN_POINTS, is_power_of_two

UINT64_MAX = 2 ** 64 - 1


class ModelKind(str, Enum):
    """Which PDE right-hand side drives the evolution."""

    ARCTAN_LOCAL = "arctan_local"
    LOG_DIFFUSION = "log_diffusion"
    ARCTAN_NONLOCAL = "arctan_nonlocal"
    REGULARIZED = "regularized"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class PresetName(str, Enum):
    CONSTANT = "constant"
    COSINE_BUMP = "cosine_bump"
    EXP_SIN = "exp_sin"
    TWO_MODE = "two_mode"
    WIENER_SMALL = "wiener_small"


PRESET_ARITY = {
    PresetName.CONSTANT: 0,
    PresetName.COSINE_BUMP: 1,
    PresetName.EXP_SIN: 1,
    PresetName.TWO_MODE: 2,
    PresetName.WIENER_SMALL: 1,
}

_PRESET_PATTERN = re.compile(r"^\s*([a-z_]+)\s*(?:\(([^)]*)\))?\s*$")


def _validate_grid_size(v: int) -> int:
    if v < MIN_POINTS or not is_power_of_two(v):
        raise ValueError(f"n must be a power of two >= {MIN_POINTS}, got {v}")
    return v


class ModelParams(BaseModel):
    """
    Selects and parameterizes the PDE right-hand side.

    Attributes:
        kind (ModelKind): which equation
        epsilon (float): artificial viscosity of the regularized problem
        kappa (float): heat-kernel mollification time of the regularized problem
        hilbert_sign (int): sign applied to the Hilbert term of the nonlocal model
        positivity_floor (float): runtime guard on min u
    """

    kind: ModelKind = Field(ModelKind.ARCTAN_LOCAL, description="PDE right-hand side")
    epsilon: float = Field(0.0, ge=0.0, description="Artificial viscosity (regularized only)")
    kappa: float = Field(0.0, ge=0.0, description="Mollification time (regularized only)")
    hilbert_sign: int = Field(1, description="Sign convention of the Hilbert term, +1 or -1")
    positivity_floor: float = Field(1e-8, gt=0.0, description="Smallest admissible min u")

    @validator("hilbert_sign")
    def validate_hilbert_sign(cls, v):
        if v not in (-1, 1):
            raise ValueError("hilbert_sign must be +1 or -1")
        return v

    @root_validator(skip_on_failure=True)
    def validate_regularization(cls, values):
        if values.get("kind") != ModelKind.REGULARIZED:
            if values.get("epsilon", 0.0) != 0.0 or values.get("kappa", 0.0) != 0.0:
                raise ValueError("epsilon and kappa must be 0 unless kind is regularized")
        return values

    class Config:
        allow_mutation = False
        schema_extra = {
            "example": {
                "kind": "regularized",
                "epsilon": 1e-3,
                "kappa": 1e-3,
                "hilbert_sign": 1,
                "positivity_floor": 1e-8,
            }
        }


class SolverConfig(BaseModel):
    """Time-integration controls."""

    cfl: float = Field(0.25, gt=0.0, le=1.0, description="Parabolic CFL number")
    t_end: float = Field(1.0, gt=0.0, description="Final time")
    record_every: float = Field(0.01, gt=0.0, description="Diagnostics sampling interval")
    max_steps: int = Field(10_000_000, gt=0, description="Hard cap on accepted steps")
    positivity_floor: float = Field(1e-8, gt=0.0, description="Smallest admissible min u")

    class Config:
        allow_mutation = False


class Preset(BaseModel):
    """
    Named initial datum.

    Parsed from strings such as ``cosine_bump(0.5)`` or ``two_mode(0.3, 0.2)``.
    """

    name: PresetName
    a: Optional[float] = None
    b: Optional[float] = None

    @root_validator(skip_on_failure=True)
    def validate_parameters(cls, values):
        name = values["name"]
        a, b = values.get("a"), values.get("b")
        given = sum(p is not None for p in (a, b))
        if given != PRESET_ARITY[name]:
            raise ValueError(f"preset {name.value} takes {PRESET_ARITY[name]} parameter(s), got {given}")
        if name in (PresetName.COSINE_BUMP, PresetName.WIENER_SMALL) and not abs(a) < 1.0:
            raise ValueError(f"{name.value} requires |a| < 1")
        if name == PresetName.WIENER_SMALL and not abs(a) < 0.1:
            raise ValueError("wiener_small requires |a| < 0.1")
        if name == PresetName.TWO_MODE and not abs(a) + abs(b) < 1.0:
            raise ValueError("two_mode requires |a| + |b| < 1")
        return values

    @classmethod
    def parse(cls, text: str) -> "Preset":
        match = _PRESET_PATTERN.match(text or "")
        if not match:
            raise ValueError(f"cannot parse preset {text!r}")
        name, raw_args = match.group(1), match.group(2)
        args = [float(x) for x in raw_args.split(",")] if raw_args and raw_args.strip() else []
        if len(args) > 2:
            raise ValueError(f"too many preset parameters in {text!r}")
        fields = dict(zip(("a", "b"), args))
        return cls(name=name, **fields)

    def __str__(self) -> str:
        args = [p for p in (self.a, self.b) if p is not None]
        if not args:
            return self.name.value
        return f"{self.name.value}({', '.join(repr(x) for x in args)})"

    class Config:
        allow_mutation = False


class TrialConfig(BaseModel):
    """Parameters of the random positive density generator."""

    seed: int = Field(0, ge=0, le=UINT64_MAX, description="64-bit unsigned seed")
    max_mode: int = Field(8, ge=0, description="Highest wavenumber K")
    min_floor: float = Field(0.1, gt=0.0, lt=1.0, description="Lower bound for 1 + g before normalization")
    amplitude_decay: float = Field(1.0, gt=0.0, description="Amplitude envelope exponent k^-decay")

    class Config:
        allow_mutation = False


class RunConfig(BaseModel):
    """
    Full configuration of a ``simulate`` run.

    Keys match the ``key = value`` config file and the ``--key`` CLI flags.
    """

    model: ModelKind = Field(ModelKind.ARCTAN_LOCAL, description="PDE to integrate")
    n: int = Field(256, description="Grid points (power of two >= 8)", example=256)
    cfl: float = Field(0.25, gt=0.0, le=1.0, description="Parabolic CFL number")
    t_end: float = Field(1.0, gt=0.0, description="Final time")
    record_every: float = Field(0.01, gt=0.0, description="Diagnostics sampling interval")
    preset: Optional[str] = Field(None, description="Initial datum preset", example="cosine_bump(0.5)")
    initial_data: Optional[str] = Field(None, description="Path to a file with n samples of u0")
    epsilon: float = Field(0.0, ge=0.0, description="Artificial viscosity (regularized only)")
    kappa: float = Field(0.0, ge=0.0, description="Mollification time (regularized only)")
    delta: float = Field(0.0, ge=0.0, description="Initial-data lift (regularized only)")
    hilbert_sign: int = Field(1, description="Sign of the Hilbert term, +1 or -1")
    output: Optional[str] = Field(None, description="Output file path")
    format: OutputFormat = Field(OutputFormat.CSV, description="Output format")
    max_steps: int = Field(10_000_000, gt=0, description="Hard cap on accepted steps")
    positivity_floor: float = Field(1e-8, gt=0.0, description="Smallest admissible min u")

    @validator("n")
    def validate_n(cls, v):
        return _validate_grid_size(v)

    @validator("hilbert_sign")
    def validate_hilbert_sign(cls, v):
        if v not in (-1, 1):
            raise ValueError("hilbert_sign must be +1 or -1")
        return v

    @validator("preset")
    def validate_preset(cls, v):
        if v is not None:
            Preset.parse(v)
        return v

    @root_validator(skip_on_failure=True)
    def validate_consistency(cls, values):
        if values.get("preset") and values.get("initial_data"):
            raise ValueError("give either preset or initial_data, not both")
        if not values.get("preset") and not values.get("initial_data"):
            values["preset"] = "cosine_bump(0.5)"
        if values.get("model") != ModelKind.REGULARIZED:
            for key in ("epsilon", "kappa", "delta"):
                if values.get(key, 0.0) != 0.0:
                    raise ValueError(f"{key} must be 0 unless model is regularized")
        return values

    def model_params(self) -> ModelParams:
        return ModelParams(
            kind=self.model,
            epsilon=self.epsilon,
            kappa=self.kappa,
            hilbert_sign=self.hilbert_sign,
            positivity_floor=self.positivity_floor,
        )

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            cfl=self.cfl,
            t_end=self.t_end,
            record_every=self.record_every,
            max_steps=self.max_steps,
            positivity_floor=self.positivity_floor,
        )

    class Config:
        schema_extra = {
            "example": {
                "model": "arctan_local",
                "n": 256,
                "cfl": 0.25,
                "t_end": 1.0,
                "record_every": 0.01,
                "preset": "cosine_bump(0.5)",
                "format": "csv",
            }
        }


class FuzzConfig(BaseModel):
    """Configuration of the inequality fuzzing campaign."""

    trials: int = Field(1000, ge=1, description="Number of random trials")
    seed0: int = Field(0, ge=0, le=UINT64_MAX, description="Base seed; trial i uses seed0 + i")
    n: int = Field(512, description="Grid points (power of two >= 8)")
    max_mode: int = Field(32, ge=0, description="Highest wavenumber K")
    min_floor: float = Field(0.05, gt=0.0, lt=1.0, description="Lower bound for 1 + g")
    amplitude_decay: float = Field(1.0, gt=0.0, description="Amplitude envelope exponent")
    tolerance: float = Field(1e-10, description="Margins below -tolerance are violations")
    report: Optional[str] = Field(None, description="Per-trial CSV report path")
    workers: int = Field(1, ge=1, description="Concurrent evaluation threads")

    @validator("n")
    def validate_n(cls, v):
        return _validate_grid_size(v)

    @root_validator(skip_on_failure=True)
    def validate_modes(cls, values):
        if values["max_mode"] > values["n"] // 4:
            raise ValueError(f"max_mode must be <= n/4 = {values['n'] // 4}")
        if values["seed0"] + values["trials"] - 1 > UINT64_MAX:
            raise ValueError("seed0 + trials exceeds the 64-bit seed range")
        return values

    def trial_config(self, index: int) -> TrialConfig:
        return TrialConfig(
            seed=self.seed0 + index,
            max_mode=self.max_mode,
            min_floor=self.min_floor,
            amplitude_decay=self.amplitude_decay,
        )

    class Config:
        schema_extra = {
            "example": {"trials": 100, "seed0": 0, "n": 512, "max_mode": 32, "tolerance": 1e-10}
        }


class StudyConfig(BaseModel):
    """Configuration of the regularization and resolution convergence studies."""

    preset: str = Field("cosine_bump(0.5)", description="Initial datum preset")
    n: int = Field(128, description="Base grid points")
    cfl: float = Field(0.25, gt=0.0, le=1.0)
    t_end: float = Field(0.25, gt=0.0)
    levels: List[float] = Field(
        default_factory=lambda: [1e-2, 1e-3, 1e-4],
        description="Regularization levels; each sets epsilon = kappa = delta",
    )
    threshold: float = Field(1e-3, gt=0.0, description="Required sup-distance at the finest level")
    resolution_tolerance: float = Field(1e-7, gt=0.0)

    @validator("n")
    def validate_n(cls, v):
        return _validate_grid_size(v)

    @validator("preset")
    def validate_preset(cls, v):
        Preset.parse(v)
        return v

    @validator("levels")
    def validate_levels(cls, v):
        if not v or any(level <= 0 for level in v):
            raise ValueError("levels must be a non-empty list of positive numbers")
        return sorted(v, reverse=True)
