"""Exact finite-truncation simulation of the discrete frequency-bin space.

A two-photon state is a dense complex amplitude table over a rectangular
window of bin-index pairs (m, n). A phase modulator on one arm convolves the
table along that axis with the sideband kernel J_p(c) e^{i p (gamma - pi/2)};
probability shifted outside a caller-supplied window is tracked in
leaked_norm instead of being renormalized away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j, truncation_order
from .closedform import ProbTable, apply_crosstalk
from .errors import InvalidInputError, WindowBoundError
from .params import BinWindow, DispersionProfile, MeasurementModel, ModulationSetting, TruncationPolicy

DEFAULT_BIN_BOUND = 512
_NORM_TOL = 1e-10
_ARMS = ("A", "B")


@dataclass(eq=False)
class TwoPhotonState:
    """Amplitude table over (Alice bin, Bob bin) pairs plus truncated-away probability.

    Operations never mutate their input state; instances are value-semantic.
    """

    window_a: BinWindow
    window_b: BinWindow
    amplitudes: np.ndarray
    leaked_norm: float = 0.0

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.window_a.width, self.window_b.width):
            raise InvalidInputError(
                f"amplitude table shape {amp.shape} does not match windows "
                f"({self.window_a.width}, {self.window_b.width})")
        if self.leaked_norm < 0.0:
            raise InvalidInputError("leaked_norm must be >= 0")
        self.amplitudes = amp

    @property
    def norm(self) -> float:
        """Probability weight still inside the window, sum |amplitude|^2."""
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def amplitude(self, m: int, n: int) -> complex:
        return complex(self.amplitudes[self.window_a.index(m), self.window_b.index(n)])

    def window(self, arm: str) -> BinWindow:
        _check_arm(arm)
        return self.window_a if arm == "A" else self.window_b


def _check_arm(arm: str) -> None:
    if arm not in _ARMS:
        raise InvalidInputError(f"arm must be 'A' or 'B', got {arm!r}")


def correlated_state(bins_a) -> TwoPhotonState:
    """Uniform frequency-correlated state (1/sqrt(K)) sum_n |n>|-n> over the given Alice bins."""
    bins = [int(n) for n in bins_a]
    if not bins:
        raise InvalidInputError("need at least one bin")
    if len(set(bins)) != len(bins):
        raise InvalidInputError("duplicate bins in correlated state")
    window_a = BinWindow(min(bins), max(bins))
    window_b = window_a.negated()
    amp = np.zeros((window_a.width, window_b.width), dtype=complex)
    weight = 1.0 / math.sqrt(len(bins))
    for n in bins:
        amp[window_a.index(n), window_b.index(-n)] = weight
    return TwoPhotonState(window_a, window_b, amp)


def modulation_kernel(setting: ModulationSetting,
                      policy: TruncationPolicy = TruncationPolicy()) -> tuple[np.ndarray, np.ndarray]:
    """Sideband offsets p in [-P, P] and weights J_p(c) e^{i p (gamma - pi/2)}."""
    p_max = truncation_order(setting.amplitude, policy)
    js = [bessel_j(p, setting.amplitude) for p in range(p_max + 1)]
    offsets = np.arange(-p_max, p_max + 1)
    weights = np.empty(offsets.size, dtype=complex)
    rot = setting.phase - 0.5 * math.pi
    for k, p in enumerate(offsets):
        jp = js[abs(p)] if (p >= 0 or p % 2 == 0) else -js[abs(p)]
        weights[k] = jp * complex(math.cos(p * rot), math.sin(p * rot))
    return offsets, weights


def apply_modulator(state: TwoPhotonState,
                    arm: str,
                    setting: ModulationSetting,
                    policy: TruncationPolicy = TruncationPolicy(),
                    *,
                    max_window: BinWindow | None = None,
                    bin_bound: int = DEFAULT_BIN_BOUND) -> TwoPhotonState:
    """Convolve one arm with the modulation kernel, widening its window by the kept order.

    Amplitude landing outside max_window (when given) is summed into
    leaked_norm. The output window must stay within |bin| <= bin_bound, which
    turns unbounded growth under repeated application into an explicit error.
    """
    _check_arm(arm)
    offsets, weights = modulation_kernel(setting, policy)
    p_max = int(offsets[-1])
    win = state.window(arm)
    wide = BinWindow(win.min_bin - p_max, win.max_bin + p_max)
    out_win = wide if max_window is None else _intersect(wide, max_window)
    if out_win is None:
        raise InvalidInputError("max_window does not overlap the modulated spectrum")
    if out_win.min_bin < -bin_bound or out_win.max_bin > bin_bound:
        raise WindowBoundError(
            f"window [{out_win.min_bin}, {out_win.max_bin}] exceeds |bin| <= {bin_bound}")

    old = state.amplitudes
    if arm == "A":
        full = np.zeros((wide.width, old.shape[1]), dtype=complex)
        for k, w in enumerate(weights):
            full[k:k + old.shape[0], :] += w * old
    else:
        full = np.zeros((old.shape[0], wide.width), dtype=complex)
        for k, w in enumerate(weights):
            full[:, k:k + old.shape[1]] += w * old

    leaked = state.leaked_norm
    if out_win != wide:
        lo = out_win.min_bin - wide.min_bin
        hi = lo + out_win.width
        if arm == "A":
            leaked += float(np.sum(np.abs(full[:lo, :]) ** 2) + np.sum(np.abs(full[hi:, :]) ** 2))
            full = full[lo:hi, :]
        else:
            leaked += float(np.sum(np.abs(full[:, :lo]) ** 2) + np.sum(np.abs(full[:, hi:]) ** 2))
            full = full[:, lo:hi]

    if arm == "A":
        return TwoPhotonState(out_win, state.window_b, full, leaked)
    return TwoPhotonState(state.window_a, out_win, full, leaked)


def _intersect(w1: BinWindow, w2: BinWindow) -> BinWindow | None:
    lo = max(w1.min_bin, w2.min_bin)
    hi = min(w1.max_bin, w2.max_bin)
    return BinWindow(lo, hi) if lo <= hi else None


def apply_dispersion(state: TwoPhotonState, profile: DispersionProfile, arm: str) -> TwoPhotonState:
    """Multiply the chosen arm's bin n amplitudes by e^{i phi(n)}; norm unchanged."""
    _check_arm(arm)
    win = state.window(arm)
    if profile.per_bin_overrides:
        outside = [n for n in profile.per_bin_overrides if not win.contains(n)]
        if outside:
            raise InvalidInputError(f"dispersion overrides outside arm {arm} window: {outside}")
    phases = np.array([profile.phase_at(n) for n in win.bins()])
    factors = np.exp(1j * phases)
    if arm == "A":
        amp = state.amplitudes * factors[:, None]
    else:
        amp = state.amplitudes * factors[None, :]
    return TwoPhotonState(state.window_a, state.window_b, amp, state.leaked_norm)


def parity_probabilities(state: TwoPhotonState, model: MeasurementModel | None = None) -> ProbTable:
    """Even/odd joint detection table; sums to 1 - leaked_norm.

    Interleaver crosstalk from the model, when given, flips each photon's
    parity label independently with probability model.crosstalk.
    """
    intensity = np.abs(state.amplitudes) ** 2
    even_a = np.fromiter((n % 2 == 0 for n in state.window_a.bins()), dtype=bool)
    even_b = np.fromiter((n % 2 == 0 for n in state.window_b.bins()), dtype=bool)
    p_ee = float(intensity[np.ix_(even_a, even_b)].sum())
    p_eo = float(intensity[np.ix_(even_a, ~even_b)].sum())
    p_oe = float(intensity[np.ix_(~even_a, even_b)].sum())
    p_oo = float(intensity[np.ix_(~even_a, ~even_b)].sum())
    table = ProbTable(p_ee, p_eo, p_oe, p_oo)
    if model is not None and model.crosstalk > 0.0:
        table = apply_crosstalk(table, model.crosstalk)
    return table


def phase_state(varphi: float, window: BinWindow) -> np.ndarray:
    """Truncated translation eigenvector with entry e^{i n varphi} / sqrt(2 pi) at bin n.

    Unnormalized; intended for property tests (sharp truncation corrupts the
    window edges, so checks should use interior entries only).
    """
    if window.width < 3:
        raise InvalidInputError("phase-state window must span at least 3 bins")
    n = np.arange(window.min_bin, window.max_bin + 1)
    return np.exp(1j * n * varphi) / math.sqrt(2.0 * math.pi)
