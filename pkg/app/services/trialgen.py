"""
Trial Generation Service

Deterministic positive densities: named presets for solver runs and
random band-limited unit-mass trials for inequality fuzzing.
"""

import logging
from typing import List, Union

import numpy as np
from pydantic import ValidationError

from app.errors import InvalidPreset
from app.models.grid import Grid, GridFunction
from app.models.request import Preset, PresetName, TrialConfig
from app.models.response import PresetInfo
from app.services.spectral import quadrature

# Configure logging
logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """
    Counter-based 64-bit generator. Constants are the standard splitmix64
    increment and finalizer multipliers, so streams are identical on every
    platform and in every language that implements them.
    """

    GAMMA = 0x9E3779B97F4A7C15
    MIX1 = 0xBF58476D1CE4E5B9
    MIX2 = 0x94D049BB133111EB

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * self.MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * self.MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def symmetric(self) -> float:
        """Uniform in [-1, 1)."""
        return 2.0 * self.uniform() - 1.0


def random_positive_density(cfg: TrialConfig, grid: Grid) -> GridFunction:
    """
    g = sum_{k=1..K} a_k cos kx + b_k sin kx with a_k, b_k drawn (in that
    order) uniform in [-1, 1] * k^-decay; g is scaled down when needed so
    that min(1 + g) >= min_floor, then 1 + g is normalized to unit mass.
    """
    if cfg.max_mode > grid.n // 4:
        raise ValueError(f"max_mode {cfg.max_mode} exceeds n/4 = {grid.n // 4}")

    rng = SplitMix64(cfg.seed)
    x = grid.points
    g = np.zeros(grid.n)
    for k in range(1, cfg.max_mode + 1):
        envelope = k ** (-cfg.amplitude_decay)
        a_k = rng.symmetric() * envelope
        b_k = rng.symmetric() * envelope
        g += a_k * np.cos(k * x) + b_k * np.sin(k * x)

    lowest = float(np.min(g))
    if 1.0 + lowest < cfg.min_floor:
        g *= (1.0 - cfg.min_floor) / -lowest

    u = grid.sample(lambda _: 1.0 + g)
    return u.scaled(1.0 / quadrature(u))


def _preset_values(p: Preset, x: np.ndarray) -> np.ndarray:
    if p.name == PresetName.CONSTANT:
        return np.ones_like(x)
    if p.name in (PresetName.COSINE_BUMP, PresetName.WIENER_SMALL):
        return 1.0 + p.a * np.cos(x)
    if p.name == PresetName.EXP_SIN:
        return np.exp(p.a * np.sin(x))
    return 1.0 + p.a * np.cos(x) + p.b * np.sin(2.0 * x)


def preset(p: Union[Preset, str], grid: Grid) -> GridFunction:
    """Sample a named initial datum; strings such as ``two_mode(0.3, 0.2)`` are parsed first."""
    if isinstance(p, str):
        try:
            p = Preset.parse(p)
        except (ValueError, ValidationError) as e:
            raise InvalidPreset(f"invalid preset {p!r}: {e}", {"preset": p}) from e

    u = grid.sample(lambda x: _preset_values(p, x))
    lowest = float(np.min(u.values))
    if lowest <= 0.0:
        raise InvalidPreset(f"preset {p} is not positive (min {lowest:.3e})", {"preset": str(p)})
    logger.debug(f"preset {p} sampled on n={grid.n}")
    return u


PRESET_CATALOG: List[PresetInfo] = [
    PresetInfo(
        name=PresetName.CONSTANT.value,
        parameters=[],
        constraint="none",
        description="u0 = 1",
    ),
    PresetInfo(
        name=PresetName.COSINE_BUMP.value,
        parameters=["a"],
        constraint="|a| < 1",
        description="u0 = 1 + a cos x",
    ),
    PresetInfo(
        name=PresetName.EXP_SIN.value,
        parameters=["a"],
        constraint="any real a",
        description="u0 = exp(a sin x)",
    ),
    PresetInfo(
        name=PresetName.TWO_MODE.value,
        parameters=["a", "b"],
        constraint="|a| + |b| < 1",
        description="u0 = 1 + a cos x + b sin 2x",
    ),
    PresetInfo(
        name=PresetName.WIENER_SMALL.value,
        parameters=["a"],
        constraint="|a| < 0.1",
        description="u0 = 1 + a cos x, inside the Wiener small-data regime (||w0||_A1 < 0.1)",
    ),
]
