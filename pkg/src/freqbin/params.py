"""Plain parameter records shared across the simulation and statistics layers."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInputError

TWO_PI = 2.0 * math.pi


def canonical_phase(phase: float) -> float:
    """Reduce an angle into [0, 2*pi)."""
    if not math.isfinite(phase):
        raise InvalidInputError("phase must be finite")
    out = phase % TWO_PI
    if out >= TWO_PI:  # fp edge: tiny negative inputs wrap onto 2*pi itself
        out = 0.0
    return out


@dataclass(frozen=True)
class TruncationPolicy:
    """Tail cut for sideband sums: squared amplitude beyond the kept orders stays below epsilon**2."""

    epsilon: float = 1e-12
    max_order: int = 64

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise InvalidInputError("epsilon must be positive")
        if self.max_order < 1:
            raise InvalidInputError("max_order must be at least 1")


@dataclass(frozen=True)
class ModulationSetting:
    """RF drive of one modulator: dimensionless amplitude c = pi*v/V_pi and phase in radians."""

    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.amplitude) or self.amplitude < 0.0:
            raise InvalidInputError("modulation amplitude must be finite and >= 0")
        object.__setattr__(self, "phase", canonical_phase(self.phase))


@dataclass(frozen=True)
class BinWindow:
    """Inclusive range of frequency-bin indices; bin n sits at absolute frequency w0 + n*Omega."""

    min_bin: int
    max_bin: int

    def __post_init__(self):
        if self.min_bin > self.max_bin:
            raise InvalidInputError(f"empty bin window [{self.min_bin}, {self.max_bin}]")

    @property
    def width(self) -> int:
        return self.max_bin - self.min_bin + 1

    def bins(self) -> range:
        return range(self.min_bin, self.max_bin + 1)

    def contains(self, n: int) -> bool:
        return self.min_bin <= n <= self.max_bin

    def index(self, n: int) -> int:
        if not self.contains(n):
            raise InvalidInputError(f"bin {n} outside window [{self.min_bin}, {self.max_bin}]")
        return n - self.min_bin

    def negated(self) -> BinWindow:
        return BinWindow(-self.max_bin, -self.min_bin)


@dataclass(frozen=True)
class DispersionProfile:
    """Per-bin propagation phase, quadratic_coefficient * n**2 radians unless overridden."""

    quadratic_coefficient: float = 0.0
    per_bin_overrides: dict[int, float] | None = None

    def phase_at(self, n: int) -> float:
        if self.per_bin_overrides and n in self.per_bin_overrides:
            return self.per_bin_overrides[n]
        return self.quadratic_coefficient * float(n) * float(n)

    def is_zero(self) -> bool:
        return self.quadratic_coefficient == 0.0 and not self.per_bin_overrides


@dataclass(frozen=True)
class MeasurementModel:
    """Detection-chain imperfections: interleaver crosstalk, lumped efficiency, flat accidentals.

    pair_rate is the detected true-coincidence rate (Hz) before the efficiency
    factor, accidental_rate the total accidental rate (Hz) summed over the four
    outcomes, duration the acquisition time (s) per setting pair.
    """

    crosstalk: float = 0.0
    efficiency: float = 1.0
    pair_rate: float = 1.5
    accidental_rate: float = 0.75
    duration: float = 1800.0

    def __post_init__(self):
        if not 0.0 <= self.crosstalk <= 0.5:
            raise InvalidInputError("crosstalk must lie in [0, 0.5]")
        if not 0.0 < self.efficiency <= 1.0:
            raise InvalidInputError("efficiency must lie in (0, 1]")
        if self.pair_rate < 0.0 or self.accidental_rate < 0.0:
            raise InvalidInputError("rates must be >= 0")
        if not self.duration > 0.0:
            raise InvalidInputError("duration must be positive")


def crosstalk_from_extinction_db(extinction_db: float) -> float:
    """Parity-flip probability equivalent to an interleaver extinction ratio in dB."""
    return 1.0 / (1.0 + 10.0 ** (extinction_db / 10.0))
