"""Coincidence-count statistics: synthesis, histogram ingestion, and estimators.

Histogram CSV format (one file per acquisition):

    # coincidence-histogram v1, bin_width_s=<float>
    <channel_pair>,<delay_bin_index>,<count>
    ...

with channel_pair in {EE, EO, OE, OO}; delay bin i covers relative delays
[i*bin_width, (i+1)*bin_width) seconds and indices must be strictly
increasing within each channel pair. CountRecord JSON uses the keys
setting_a, setting_b, duration_s, counts, background.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .closedform import ProbTable, apply_crosstalk, effective_drive, ideal_probabilities
from .errors import EstimatorError, HistogramFormatError, InvalidInputError
from .params import MeasurementModel, ModulationSetting

OUTCOMES = ("EE", "EO", "OE", "OO")

_HEADER_RE = re.compile(r"^#\s*coincidence-histogram v1,\s*bin_width_s=([0-9eE+\-.]+)\s*$")

# Canonical analysis windows matching synthesize_histogram's defaults: the
# coincidence peak occupies delay bins 0..3 at 0.5 ns steps.
DEFAULT_BIN_WIDTH_S = 0.5e-9
DEFAULT_PEAK_WINDOW = (0.0, 2.0e-9)
DEFAULT_BACKGROUND_WINDOW = (5.0e-9, 4.5e-8)


@dataclass(frozen=True)
class CountRecord:
    """Four coincidence counts for one setting pair plus expected accidental background."""

    n_ee: int
    n_eo: int
    n_oe: int
    n_oo: int
    setting_labels: tuple[str, str] = ("", "")
    duration: float = 1.0
    background_per_outcome: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if any(c < 0 for c in self.counts()):
            raise InvalidInputError("counts must be >= 0")
        if any(b < 0.0 for b in self.background_per_outcome):
            raise InvalidInputError("background must be >= 0")
        if not self.duration > 0.0:
            raise InvalidInputError("duration must be positive")

    def counts(self) -> tuple[int, int, int, int]:
        return (self.n_ee, self.n_eo, self.n_oe, self.n_oo)

    def net_counts(self) -> tuple[float, float, float, float]:
        """Raw minus expected background, kept signed."""
        return tuple(c - b for c, b in zip(self.counts(), self.background_per_outcome))

    def to_json_dict(self) -> dict:
        return {
            "setting_a": self.setting_labels[0],
            "setting_b": self.setting_labels[1],
            "duration_s": self.duration,
            "counts": dict(zip(OUTCOMES, self.counts())),
            "background": dict(zip(OUTCOMES, self.background_per_outcome)),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> CountRecord:
        counts = data["counts"]
        background = data.get("background", {})
        return cls(
            n_ee=int(counts["EE"]), n_eo=int(counts["EO"]),
            n_oe=int(counts["OE"]), n_oo=int(counts["OO"]),
            setting_labels=(str(data.get("setting_a", "")), str(data.get("setting_b", ""))),
            duration=float(data.get("duration_s", 1.0)),
            background_per_outcome=tuple(float(background.get(k, 0.0)) for k in OUTCOMES),
        )


@dataclass(eq=False)
class Histogram:
    """Coincidence counts per channel pair over relative-delay bins.

    Arrays share a common span starting at start_index; missing channel pairs
    mean no events were recorded there. coincidence_window is analysis
    metadata (None selects the full span) and is not serialized.
    """

    bin_width_s: float
    start_index: int
    counts: dict[str, np.ndarray]
    coincidence_window: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.bin_width_s > 0.0:
            raise InvalidInputError("bin_width_s must be positive")
        if not self.counts:
            raise InvalidInputError("histogram needs at least one channel pair")
        lengths = set()
        for pair, arr in self.counts.items():
            if pair not in OUTCOMES:
                raise InvalidInputError(f"unknown channel pair {pair!r}")
            arr = np.asarray(arr, dtype=np.int64)
            if np.any(arr < 0):
                raise InvalidInputError("histogram counts must be >= 0")
            self.counts[pair] = arr
            lengths.add(arr.size)
        if len(lengths) != 1 or lengths == {0}:
            raise InvalidInputError("channel-pair arrays must share one nonzero length")
        if self.coincidence_window is None:
            self.coincidence_window = self.span_s
        lo, hi = self.coincidence_window
        span_lo, span_hi = self.span_s
        if not (span_lo <= lo < hi <= span_hi):
            raise InvalidInputError("coincidence window must lie within the histogram span")

    @property
    def n_bins(self) -> int:
        return next(iter(self.counts.values())).size

    @property
    def span_s(self) -> tuple[float, float]:
        return (self.start_index * self.bin_width_s,
                (self.start_index + self.n_bins) * self.bin_width_s)


def simulate_counts(probs: ProbTable, model: MeasurementModel, seed: int,
                    labels: tuple[str, str] = ("", "")) -> CountRecord:
    """Draw Poisson coincidence counts for one setting pair.

    Outcome xy has mean duration * (efficiency * pair_rate * P(x,y)
    + accidental_rate / 4); the accidental means are recorded as the
    background. Deterministic for a given seed.
    """
    rng = np.random.default_rng(seed)
    accidental_mean = model.duration * model.accidental_rate / 4.0
    signal_scale = model.duration * model.efficiency * model.pair_rate
    means = [signal_scale * p + accidental_mean for p in probs.as_tuple()]
    drawn = [int(rng.poisson(m)) for m in means]
    return CountRecord(*drawn, setting_labels=labels, duration=model.duration,
                       background_per_outcome=(accidental_mean,) * 4)


def synthesize_histogram(probs: ProbTable, model: MeasurementModel, seed: int,
                         *, bin_width_s: float = DEFAULT_BIN_WIDTH_S,
                         span_bins: int = 200, peak_bins: int = 4) -> Histogram:
    """Synthetic delay histogram: true coincidences in the peak bins, flat accidentals.

    The peak occupies delay bins 0 .. peak_bins-1; the per-outcome accidental
    mean inside that window equals duration * accidental_rate / 4, spread
    flat over the whole span. Deterministic for a given seed.
    """
    if span_bins <= peak_bins or peak_bins < 1:
        raise InvalidInputError("span must exceed the peak width")
    rng = np.random.default_rng(seed)
    start = -span_bins // 2
    peak_lo = -start  # array offset of delay bin 0
    accidental_per_bin = model.duration * model.accidental_rate / 4.0 / peak_bins
    signal_scale = model.duration * model.efficiency * model.pair_rate
    counts: dict[str, np.ndarray] = {}
    for outcome, p in zip(OUTCOMES, probs.as_tuple()):
        true_total = int(rng.poisson(signal_scale * p))
        spread = rng.multinomial(true_total, [1.0 / peak_bins] * peak_bins)
        arr = rng.poisson(accidental_per_bin, size=span_bins).astype(np.int64)
        arr[peak_lo:peak_lo + peak_bins] += spread
        counts[outcome] = arr
    return Histogram(bin_width_s=bin_width_s, start_index=start, counts=counts)


def emit_histogram(histogram: Histogram) -> str:
    """Serialize to the histogram CSV format (canonical pair and index order)."""
    lines = [f"# coincidence-histogram v1, bin_width_s={histogram.bin_width_s!r}"]
    for pair in OUTCOMES:
        if pair not in histogram.counts:
            continue
        for offset, count in enumerate(histogram.counts[pair]):
            lines.append(f"{pair},{histogram.start_index + offset},{int(count)}")
    return "\n".join(lines) + "\n"


def ingest_histogram(source) -> Histogram:
    """Parse the histogram CSV format from a string, bytes, or readable stream.

    Malformed input is rejected with the offending line number.
    """
    text = _read_text(source)
    lines = text.splitlines()
    if not lines:
        raise HistogramFormatError("empty input", line=1)
    match = _HEADER_RE.match(lines[0])
    if not match:
        raise HistogramFormatError("expected '# coincidence-histogram v1, bin_width_s=<float>'", line=1)
    try:
        bin_width = float(match.group(1))
    except ValueError:
        raise HistogramFormatError("unparsable bin_width_s", line=1) from None
    if not bin_width > 0.0:
        raise HistogramFormatError("bin_width_s must be positive", line=1)

    rows: dict[str, list[tuple[int, int]]] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        stripped = raw.strip()
        if not stripped:
            continue
        fields = stripped.split(",")
        if len(fields) != 3:
            raise HistogramFormatError("expected 'channel_pair,delay_bin_index,count'", line=lineno)
        pair = fields[0].strip()
        if pair not in OUTCOMES:
            raise HistogramFormatError(f"unknown channel pair {pair!r}", line=lineno)
        try:
            index = int(fields[1])
            count = int(fields[2])
        except ValueError:
            raise HistogramFormatError("delay_bin_index and count must be integers", line=lineno) from None
        if count < 0:
            raise HistogramFormatError(f"negative count {count}", line=lineno)
        per_pair = rows.setdefault(pair, [])
        if per_pair and index <= per_pair[-1][0]:
            raise HistogramFormatError(
                f"non-monotone delay bins for {pair}: {index} after {per_pair[-1][0]}", line=lineno)
        per_pair.append((index, count))
    if not rows:
        raise HistogramFormatError("no data rows", line=len(lines))

    lo = min(idx for entries in rows.values() for idx, _ in entries)
    hi = max(idx for entries in rows.values() for idx, _ in entries)
    counts = {}
    for pair, entries in rows.items():
        arr = np.zeros(hi - lo + 1, dtype=np.int64)
        for index, count in entries:
            arr[index - lo] = count
        counts[pair] = arr
    return Histogram(bin_width_s=bin_width, start_index=lo, counts=counts)


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    raise InvalidInputError(f"cannot read histogram from {type(source)!r}")


def extract_counts(histogram: Histogram,
                   peak_window: tuple[float, float],
                   background_window: tuple[float, float],
                   *, duration_s: float = 1.0,
                   labels: tuple[str, str] = ("", "")) -> CountRecord:
    """Window the histogram into a CountRecord.

    Raw integers are the peak-window sums; the background estimate is the
    background-window sum rescaled by the ratio of selected bin counts.
    Subtraction itself is deferred to the estimators. The histogram format
    carries no acquisition time, so duration_s is caller-supplied metadata.
    """
    peak = _window_indices(histogram, peak_window, "peak window")
    back = _window_indices(histogram, background_window, "background window")
    if max(peak.start, back.start) < min(peak.stop, back.stop):
        raise InvalidInputError("peak and background windows overlap")
    ratio = (peak.stop - peak.start) / (back.stop - back.start)
    raw = []
    background = []
    for pair in OUTCOMES:
        arr = histogram.counts.get(pair)
        if arr is None:
            raw.append(0)
            background.append(0.0)
        else:
            raw.append(int(arr[peak].sum()))
            background.append(float(arr[back].sum()) * ratio)
    return CountRecord(*raw, setting_labels=labels, duration=duration_s,
                       background_per_outcome=tuple(background))


def _window_indices(histogram: Histogram, window: tuple[float, float], name: str) -> slice:
    lo, hi = float(window[0]), float(window[1])
    span_lo, span_hi = histogram.span_s
    if not lo < hi:
        raise InvalidInputError(f"{name} is empty")
    if lo < span_lo - 1e-15 or hi > span_hi + 1e-15:
        raise InvalidInputError(f"{name} ({lo}, {hi}) outside histogram span {histogram.span_s}")
    w = histogram.bin_width_s
    first = math.ceil(lo / w - 1e-9)   # bins whose start lies in [lo, hi)
    last = math.ceil(hi / w - 1e-9)
    i0 = max(first - histogram.start_index, 0)
    i1 = min(last - histogram.start_index, histogram.n_bins)
    if i1 <= i0:
        raise InvalidInputError(f"{name} selects no bins")
    return slice(i0, i1)


def visibility(sweep, outcome: str) -> tuple[float, float]:
    """Fringe visibility (N_max - N_min) / (N_max + N_min) of one cross outcome.

    Counts are background-subtracted and converted to rates; negative nets are
    clamped to zero with a warning. The uncertainty is first-order Poisson
    propagation through the ratio.
    """
    if outcome not in ("EO", "OE"):
        raise InvalidInputError("visibility outcome must be 'EO' or 'OE'")
    records = list(sweep)
    if len(records) < 5:
        raise InvalidInputError("visibility scan needs at least 5 points")
    idx = OUTCOMES.index(outcome)
    rates = []
    variances = []
    for rec in records:
        net = rec.net_counts()[idx]
        if net < 0.0:
            warnings.warn(f"negative net count {net:.2f} clamped to 0 in visibility", RuntimeWarning)
            net = 0.0
        rates.append(net / rec.duration)
        variances.append(rec.counts()[idx] / rec.duration**2)
    i_max = int(np.argmax(rates))
    i_min = int(np.argmin(rates))
    n_max, n_min = rates[i_max], rates[i_min]
    total = n_max + n_min
    if total <= 0.0:
        raise EstimatorError("non-positive net counts: visibility undefined")
    vis = (n_max - n_min) / total
    d_max = 2.0 * n_min / total**2
    d_min = -2.0 * n_max / total**2
    sigma = math.sqrt(d_max**2 * variances[i_max] + d_min**2 * variances[i_min])
    return vis, sigma


def chsh_estimate(records, subtract: bool = True,
                  normalization: tuple[float, float, float, float] | None = None
                  ) -> tuple[float, float, tuple[float, float, float, float]]:
    """CHSH estimate from four CountRecords ordered (A0B0, A0B1, A1B0, A1B1).

    Per pair, C = N^- / N^+ with N^{+-} = (EE + OO) +- (EO + OE) from net
    counts; S = C00 + C01 + C10 - C11. sigma via the delta method on
    independent Poisson counts, treating the recorded background means as
    known. The optional per-outcome normalization factors divide the net
    counts (modulation-off calibration); default is no rescaling.
    """
    records = list(records)
    if len(records) != 4:
        raise InvalidInputError("chsh_estimate needs exactly 4 records (00, 01, 10, 11)")
    if normalization is None:
        normalization = (1.0, 1.0, 1.0, 1.0)
    if len(normalization) != 4 or any(f <= 0.0 for f in normalization):
        raise InvalidInputError("normalization needs 4 positive factors")
    c_values = []
    variances = []
    for rec in records:
        raw = rec.counts()
        values = rec.net_counts() if subtract else tuple(float(c) for c in raw)
        values = [v / f for v, f in zip(values, normalization)]
        var = [r / f**2 for r, f in zip(raw, normalization)]
        same = values[0] + values[3]
        cross = values[1] + values[2]
        var_same = var[0] + var[3]
        var_cross = var[1] + var[2]
        n_plus = same + cross
        if n_plus <= 0.0:
            raise EstimatorError("non-positive net denominator N+ for "
                                 f"settings {rec.setting_labels}")
        c_values.append((same - cross) / n_plus)
        variances.append(4.0 * (cross**2 * var_same + same**2 * var_cross) / n_plus**4)
    s = c_values[0] + c_values[1] + c_values[2] - c_values[3]
    sigma_s = math.sqrt(sum(variances))
    return s, sigma_s, tuple(c_values)


def crosstalk_for_visibility(amplitude: float, target: float, *, tol: float = 1e-12) -> float:
    """Crosstalk chi that degrades the ideal equal-amplitude phase-scan visibility to target.

    In the closed-form model the cross-outcome fringe runs from
    chi * (1 - chi) at drive cancellation up to the mixed table value at
    phase agreement; V(chi) is strictly decreasing on [0, 0.5], so a
    bisection inverts it.
    """
    if not 0.0 < target <= 1.0:
        raise InvalidInputError("target visibility must lie in (0, 1]")

    def vis_of(chi: float) -> float:
        aligned = apply_crosstalk(ideal_probabilities(
            effective_drive(ModulationSetting(amplitude, 0.0), ModulationSetting(amplitude, 0.0))), chi)
        p_max = aligned.p_eo
        p_min = chi * (1.0 - chi)
        return (p_max - p_min) / (p_max + p_min)

    lo, hi = 0.0, 0.5
    if vis_of(hi) > target:
        raise InvalidInputError(f"target visibility {target} unreachable at amplitude {amplitude}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if vis_of(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
