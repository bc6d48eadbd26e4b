"""Run configuration: defaults, JSON config files, and flag overrides.

rf_frequency and center_frequency are carried as run metadata only; the
discrete simulation depends on bin indices alone.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .errors import InvalidInputError
from .params import DispersionProfile, MeasurementModel, TruncationPolicy


@dataclass(frozen=True)
class RunConfig:
    rf_frequency: float = 25e9            # Omega / 2pi, Hz
    center_frequency: float = 193.125e12  # omega_0 / 2pi, Hz
    bins: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    truncation: TruncationPolicy = TruncationPolicy()
    measurement: MeasurementModel = MeasurementModel()
    dispersion: DispersionProfile = DispersionProfile()
    seed: int = 12345

    def __post_init__(self):
        if not self.rf_frequency > 0.0:
            raise InvalidInputError("rf_frequency must be positive")
        if not self.bins:
            raise InvalidInputError("bins must be non-empty")

    def to_dict(self) -> dict:
        overrides = self.dispersion.per_bin_overrides or {}
        return {
            "rf_frequency": self.rf_frequency,
            "center_frequency": self.center_frequency,
            "bins": list(self.bins),
            "seed": self.seed,
            "truncation": dataclasses.asdict(self.truncation),
            "measurement": dataclasses.asdict(self.measurement),
            "dispersion": {
                "quadratic_coefficient": self.dispersion.quadratic_coefficient,
                "per_bin_overrides": {str(k): v for k, v in overrides.items()},
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        base = cls()
        unknown = set(data) - set(base.to_dict())
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
        disp = data.get("dispersion", {})
        overrides = {int(k): float(v) for k, v in (disp.get("per_bin_overrides") or {}).items()}
        return cls(
            rf_frequency=float(data.get("rf_frequency", base.rf_frequency)),
            center_frequency=float(data.get("center_frequency", base.center_frequency)),
            bins=tuple(int(b) for b in data.get("bins", base.bins)),
            truncation=TruncationPolicy(**data.get("truncation", {})),
            measurement=MeasurementModel(**data.get("measurement", {})),
            dispersion=DispersionProfile(
                quadratic_coefficient=float(disp.get("quadratic_coefficient", 0.0)),
                per_bin_overrides=overrides or None,
            ),
            seed=int(data.get("seed", base.seed)),
        )


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidInputError(f"config file {path}: expected a JSON object")
    return RunConfig.from_dict(data)


def parse_bins(text: str) -> tuple[int, ...]:
    """Bin list from '1,2,3' or an inclusive range 'lo..hi'."""
    text = text.strip()
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
        if hi < lo:
            raise InvalidInputError(f"bad bin range {text!r}")
        return tuple(range(lo, hi + 1))
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise InvalidInputError(f"bad bin list {text!r}") from None
