"""CHSH correlator evaluation and optimization over modulation settings.

In the closed-form model every correlator is E_ij = J_0(2 D_ij) with D_ij the
effective drive of the setting pair, so S = E00 + E01 + E10 - E11. The
symmetric reduction D00 = D01 = D10 = D11 / 3 collapses the search to one
amplitude, S(c) = 3 J_0(4c) - J_0(12c); the general 8-parameter search is kept
as a numerical check of that structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j
from .binspace import apply_dispersion, apply_modulator, correlated_state, parity_probabilities
from .closedform import EffectiveDrive, effective_drive
from .errors import InvalidInputError, OptimizationError
from .params import DispersionProfile, MeasurementModel, ModulationSetting, TruncationPolicy

PAIR_LABELS = (("A0", "B0"), ("A0", "B1"), ("A1", "B0"), ("A1", "B1"))


@dataclass(frozen=True)
class SettingQuad:
    """The four CHSH measurement settings: Alice's a0, a1 and Bob's b0, b1."""

    a0: ModulationSetting
    a1: ModulationSetting
    b0: ModulationSetting
    b1: ModulationSetting

    def pairs(self) -> tuple[tuple[ModulationSetting, ModulationSetting], ...]:
        """Setting pairs in correlator order 00, 01, 10, 11."""
        return ((self.a0, self.b0), (self.a0, self.b1), (self.a1, self.b0), (self.a1, self.b1))


@dataclass(frozen=True)
class ChshReport:
    """Four correlators E_ij (order 00, 01, 10, 11), their drives, and S."""

    correlators: tuple[float, float, float, float]
    s_value: float
    drives: tuple[EffectiveDrive, EffectiveDrive, EffectiveDrive, EffectiveDrive]

    def __post_init__(self):
        if any(abs(e) > 1.0 + 1e-9 for e in self.correlators):
            raise InvalidInputError(f"correlators outside [-1, 1]: {self.correlators}")

    @classmethod
    def from_correlators(cls, correlators, drives) -> ChshReport:
        e00, e01, e10, e11 = correlators
        return cls(tuple(correlators), e00 + e01 + e10 - e11, tuple(drives))


def chsh_optimal_quad() -> SettingQuad:
    """Settings maximizing S in the closed-form model: amplitudes (0.2318, 0.6955), phases (0, pi)."""
    low = ModulationSetting(0.2318, 0.0)
    high = ModulationSetting(0.6955, np.pi)
    return SettingQuad(a0=low, a1=high, b0=low, b1=high)


def symmetric_quad(c: float) -> SettingQuad:
    """Quad with amplitudes (c, 3c) on both arms and phases (0, pi): realizes D11 = 3 D00."""
    low = ModulationSetting(c, 0.0)
    high = ModulationSetting(3.0 * c, np.pi)
    return SettingQuad(a0=low, a1=high, b0=low, b1=high)


def symmetric_chsh(c: float) -> float:
    """S along the symmetric family, 3 J_0(4c) - J_0(12c)."""
    return 3.0 * bessel_j(0, 4.0 * c) - bessel_j(0, 12.0 * c)


def chsh_ideal(quad: SettingQuad) -> ChshReport:
    """Closed-form CHSH report for the given settings."""
    drives = tuple(effective_drive(sa, sb) for sa, sb in quad.pairs())
    correlators = tuple(bessel_j(0, 2.0 * dr.d) for dr in drives)
    return ChshReport.from_correlators(correlators, drives)


def optimize_symmetric(search_interval: tuple[float, float] = (0.0, 0.5),
                       tolerance: float = 1e-6) -> tuple[float, float]:
    """Maximize S(c) = 3 J_0(4c) - J_0(12c) by bounded bracketing search.

    Returns (c_star, s_star). Raises if the maximum sits on the interval
    boundary, i.e. no interior maximum was bracketed.
    """
    from scipy.optimize import minimize_scalar

    lo, hi = float(search_interval[0]), float(search_interval[1])
    if not 0.0 <= lo < hi <= 1.0:
        raise InvalidInputError("search interval must satisfy 0 <= lo < hi <= 1")
    if tolerance < 1e-6:
        raise InvalidInputError("tolerance below supported resolution 1e-6")
    res = minimize_scalar(lambda c: -symmetric_chsh(c), bounds=(lo, hi), method="bounded",
                          options={"xatol": tolerance})
    c_star = float(res.x)
    if min(c_star - lo, hi - c_star) <= 2.0 * tolerance:
        raise OptimizationError(
            f"no interior maximum in [{lo}, {hi}]: search stopped at boundary c = {c_star}")
    return c_star, symmetric_chsh(c_star)


def optimize_general(initial: SettingQuad,
                     amplitude_bound: float = 1.5,
                     restarts: int = 20,
                     seed: int = 0) -> tuple[SettingQuad, ChshReport]:
    """Seeded multi-start Nelder-Mead over all 8 setting parameters.

    Reports the best quad found (never raises on a poor run), gauge-fixed so
    that alpha_0 = 0.
    """
    from scipy.optimize import minimize

    if amplitude_bound < 1.0:
        raise InvalidInputError("amplitude_bound must be >= 1")
    if restarts < 1:
        raise InvalidInputError("restarts must be >= 1")

    two_pi = 2.0 * np.pi

    def unpack(x) -> SettingQuad:
        a0, a1, b0, b1, al0, al1, be0, be1 = x
        return SettingQuad(a0=ModulationSetting(a0, al0), a1=ModulationSetting(a1, al1),
                           b0=ModulationSetting(b0, be0), b1=ModulationSetting(b1, be1))

    def neg_s(x) -> float:
        return -chsh_ideal(unpack(x)).s_value

    rng = np.random.default_rng(seed)
    starts = [np.array([initial.a0.amplitude, initial.a1.amplitude,
                        initial.b0.amplitude, initial.b1.amplitude,
                        initial.a0.phase, initial.a1.phase,
                        initial.b0.phase, initial.b1.phase])]
    for _ in range(restarts - 1):
        starts.append(np.concatenate([rng.uniform(0.0, amplitude_bound, 4),
                                      rng.uniform(0.0, two_pi, 4)]))

    bounds = [(0.0, amplitude_bound)] * 4 + [(-two_pi, 2.0 * two_pi)] * 4
    options = {"xatol": 1e-10, "fatol": 1e-13, "maxiter": 8000, "maxfev": 8000}
    best = None
    for x0 in starts:
        res = minimize(neg_s, x0, method="Nelder-Mead", bounds=bounds, options=options)
        if best is None or res.fun < best.fun:
            best = res
    polish = minimize(neg_s, best.x, method="Nelder-Mead", bounds=bounds, options=options)
    if polish.fun < best.fun:
        best = polish

    x = best.x.copy()
    x[4:] -= x[4]  # gauge: report with alpha_0 = 0
    quad = unpack(x)
    return quad, chsh_ideal(quad)


def chsh_finite(quad: SettingQuad,
                bins,
                model: MeasurementModel | None = None,
                dispersion: DispersionProfile | None = None,
                policy: TruncationPolicy | None = None) -> ChshReport:
    """CHSH report from the finite-bin simulation of a uniform correlated state."""
    if policy is None:
        policy = TruncationPolicy()
    base = correlated_state(bins)
    if dispersion is not None and not dispersion.is_zero():
        base = apply_dispersion(base, dispersion, "A")
        base = apply_dispersion(base, dispersion, "B")
    correlators = []
    drives = []
    for setting_a, setting_b in quad.pairs():
        state = apply_modulator(base, "A", setting_a, policy)
        state = apply_modulator(state, "B", setting_b, policy)
        table = parity_probabilities(state, model)
        correlators.append(table.correlator)
        drives.append(effective_drive(setting_a, setting_b))
    return ChshReport.from_correlators(correlators, drives)
