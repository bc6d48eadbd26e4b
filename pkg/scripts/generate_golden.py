#!/usr/bin/env python3
"""Regenerate tests/golden/golden_values.json.

The frozen values are deterministic functions of the simulation (fixed
summation order, no RNG), so they are reproducible across platforms to well
below the 1e-9 comparison tolerance used by the tests.
"""

import json
import math
from pathlib import Path

from freqbin import (ModulationSetting, chsh_finite, effective_drive, ideal_probabilities,
                     chsh_optimal_quad)
from freqbin.binspace import apply_modulator, correlated_state, parity_probabilities

GOLDEN_PATH = Path(__file__).resolve().parents[1] / "tests" / "golden" / "golden_values.json"


def finite_probability_deviation(bins, quad):
    """Max |finite - closed-form| over the four table entries and four pairs."""
    base = correlated_state(bins)
    worst = 0.0
    for setting_a, setting_b in quad.pairs():
        state = apply_modulator(base, "A", setting_a)
        state = apply_modulator(state, "B", setting_b)
        table = parity_probabilities(state)
        ideal = ideal_probabilities(effective_drive(setting_a, setting_b))
        worst = max(worst, max(abs(x - y) for x, y in zip(table.as_tuple(), ideal.as_tuple())))
    return worst


def pattern_gap(bins, amplitude, steps):
    """Max |ideal - finite| over the default interference sweep."""
    base = correlated_state(bins)
    setting_b = ModulationSetting(amplitude, 0.0)
    worst = 0.0
    for k in range(steps):
        alpha = k * 2.0 * math.pi / (steps - 1)
        setting_a = ModulationSetting(amplitude, alpha)
        ideal = ideal_probabilities(effective_drive(setting_a, setting_b))
        state = apply_modulator(base, "A", setting_a)
        state = apply_modulator(state, "B", setting_b)
        finite = parity_probabilities(state)
        worst = max(worst, max(abs(x - y) for x, y in zip(finite.as_tuple(), ideal.as_tuple())))
    return worst


def main():
    quad = chsh_optimal_quad()
    report6 = chsh_finite(quad, range(1, 7))
    report41 = chsh_finite(quad, range(-20, 21))

    base41 = correlated_state(range(-20, 21))
    state = apply_modulator(base41, "A", ModulationSetting(0.6955, 0.0))
    state = apply_modulator(state, "B", ModulationSetting(0.6955, math.pi))
    cancel_table = parity_probabilities(state)

    golden = {
        "finite_6bin_s": report6.s_value,
        "finite_6bin_correlators": list(report6.correlators),
        "finite_41bin_s": report41.s_value,
        "finite_41bin_max_prob_deviation": finite_probability_deviation(range(-20, 21), quad),
        "finite_41bin_cancellation_p_eo": cancel_table.p_eo,
        "pattern_6bin_max_gap": pattern_gap(range(1, 7), 0.6955, 25),
    }
    GOLDEN_PATH.parent.mkdir(parents=True, exist_ok=True)
    GOLDEN_PATH.write_text(json.dumps(golden, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for key, value in sorted(golden.items()):
        print(f"{key}: {value!r}")


if __name__ == "__main__":
    main()
