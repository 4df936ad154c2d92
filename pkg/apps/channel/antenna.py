"""
Sector-beam directional gains.

The satellite always sees a transmitter through its receive main lobe; an
interfering transmitter points its own main lobe at the satellite with
probability theta / 2pi and its side lobe otherwise.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from apps.common.units import db_to_linear


@dataclass(frozen=True)
class BeamPattern:
    """Linear gains and the main-lobe width in radians"""

    g_main_tx: float
    g_side_tx: float
    g_main_rx: float
    theta: float

    def __post_init__(self):
        errors = []
        if not 0 < self.g_side_tx <= self.g_main_tx:
            errors.append("gains must satisfy 0 < g_side_tx <= g_main_tx")
        if not self.g_main_rx > 0:
            errors.append("g_main_rx must be > 0")
        if not 0 <= self.theta <= 2.0 * math.pi:
            errors.append("theta must lie in [0, 2pi]")
        if errors:
            raise ValueError('; '.join(errors))

    @classmethod
    def from_dbi(cls, g_main_tx_dbi, g_side_tx_dbi, g_main_rx_dbi, theta):
        return cls(
            g_main_tx=db_to_linear(g_main_tx_dbi),
            g_side_tx=db_to_linear(g_side_tx_dbi),
            g_main_rx=db_to_linear(g_main_rx_dbi),
            theta=theta,
        )

    @property
    def main_lobe_probability(self) -> float:
        return self.theta / (2.0 * math.pi)

    @property
    def main_gain(self) -> float:
        return self.g_main_tx * self.g_main_rx

    @property
    def side_gain(self) -> float:
        return self.g_side_tx * self.g_main_rx


def target_gain(p: BeamPattern) -> float:
    return p.main_gain


def sample_interferer_gain(rng: np.random.Generator, p: BeamPattern, size=None):
    main = rng.random(size) < p.main_lobe_probability
    gains = np.where(main, p.main_gain, p.side_gain)
    return float(gains) if size is None else gains


def mean_gain_mixture(p: BeamPattern, f: Callable[[float], float]) -> float:
    """E[f(D)] over the two-level gain distribution of an interferer"""
    prob = p.main_lobe_probability
    return f(p.main_gain) * prob + f(p.side_gain) * (1.0 - prob)
