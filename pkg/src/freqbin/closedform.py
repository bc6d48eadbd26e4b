"""Infinite-comb closed-form model of the parity coincidence statistics.

The two modulator drives (a, alpha) and (b, beta) enter the joint statistics
only through the phasor sum D e^{i Delta} = a e^{i alpha} + b e^{i beta}.
The four parity-resolved coincidence probabilities are then

    P(E,E) = P(O,O) = (1 + J_0(2D)) / 4
    P(E,O) = P(O,E) = (1 - J_0(2D)) / 4

and an independent quadrature oracle reproduces them by averaging the
effective qubit rotation angle over the inaccessible phase-state label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j
from .errors import InvalidInputError
from .params import ModulationSetting, canonical_phase

_PROB_SLACK = 1e-9


@dataclass(frozen=True)
class EffectiveDrive:
    """Combined modulation of both arms: amplitude d >= 0 and phase delta in [0, 2*pi)."""

    d: float
    delta: float

    def __post_init__(self):
        if self.d < 0.0:
            raise InvalidInputError("effective drive amplitude must be >= 0")


@dataclass(frozen=True)
class ProbTable:
    """Joint parity-outcome probabilities P(x, y) for x, y in {even, odd}."""

    p_ee: float
    p_eo: float
    p_oe: float
    p_oo: float

    def __post_init__(self):
        for name, p in zip(("p_ee", "p_eo", "p_oe", "p_oo"), self.as_tuple()):
            if not -_PROB_SLACK <= p <= 1.0 + _PROB_SLACK:
                raise InvalidInputError(f"{name} = {p!r} is not a probability")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_ee, self.p_eo, self.p_oe, self.p_oo)

    @property
    def total(self) -> float:
        return self.p_ee + self.p_eo + self.p_oe + self.p_oo

    @property
    def correlator(self) -> float:
        """E = P(E,E) - P(E,O) - P(O,E) + P(O,O)."""
        return self.p_ee - self.p_eo - self.p_oe + self.p_oo


def effective_drive(a_setting: ModulationSetting, b_setting: ModulationSetting) -> EffectiveDrive:
    """Phasor sum of the two drives; delta = 0 by convention when d vanishes."""
    a, alpha = a_setting.amplitude, a_setting.phase
    b, beta = b_setting.amplitude, b_setting.phase
    d_sq = a * a + b * b + 2.0 * a * b * math.cos(alpha - beta)
    d = math.sqrt(max(d_sq, 0.0))
    if d == 0.0:
        return EffectiveDrive(0.0, 0.0)
    delta = math.atan2(a * math.sin(alpha) + b * math.sin(beta),
                       a * math.cos(alpha) + b * math.cos(beta))
    return EffectiveDrive(d, canonical_phase(delta))


def ideal_probabilities(drive: EffectiveDrive) -> ProbTable:
    """Closed-form parity coincidence table; depends on the drive amplitude only."""
    j0 = bessel_j(0, 2.0 * drive.d)
    same = 0.25 * (1.0 + j0)
    cross = 0.25 * (1.0 - j0)
    return ProbTable(same, cross, cross, same)


def phase_average_oracle(a_setting: ModulationSetting,
                         b_setting: ModulationSetting,
                         quadrature_points: int = 256) -> ProbTable:
    """Numerically average cos^2 / sin^2 of the summed rotation angle over the phase label.

    Uses an equally spaced midpoint rule on [0, pi]; the integrand is smooth
    and pi-periodic, so the rule converges spectrally (1e-9 agreement with
    ideal_probabilities at >= 256 points). Independent of the Bessel-identity
    route, hence usable as its oracle.
    """
    if quadrature_points < 64:
        raise InvalidInputError("need at least 64 quadrature points")
    phi = (np.arange(quadrature_points) + 0.5) * (math.pi / quadrature_points)
    theta = (a_setting.amplitude * np.cos(phi - a_setting.phase)
             + b_setting.amplitude * np.cos(phi - b_setting.phase))
    same = 0.5 * float(np.mean(np.cos(theta) ** 2))
    cross = 0.5 * float(np.mean(np.sin(theta) ** 2))
    return ProbTable(same, cross, cross, same)


def apply_crosstalk(table: ProbTable, crosstalk: float) -> ProbTable:
    """Mix the table under independent per-photon parity flips with probability crosstalk."""
    if not 0.0 <= crosstalk <= 0.5:
        raise InvalidInputError("crosstalk must lie in [0, 0.5]")
    if crosstalk == 0.0:
        return table
    t = 1.0 - crosstalk
    x = crosstalk
    ee, eo, oe, oo = table.as_tuple()
    return ProbTable(
        t * t * ee + t * x * eo + x * t * oe + x * x * oo,
        t * x * ee + t * t * eo + x * x * oe + x * t * oo,
        x * t * ee + x * x * eo + t * t * oe + t * x * oo,
        x * x * ee + x * t * eo + t * x * oe + t * t * oo,
    )
