"""Scenario, detector and training configuration with JSON round-trip.

Field names in the JSON file carry their units (``prf_hz``,
``crab_angle_deg``); angles are converted to radians by the properties on
:class:`RadarScenarioConfig`.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from scipy.constants import c as SPEED_OF_LIGHT

from .errors import ValidationError

DEFAULT_CONFIG = "default_scenario.json"


def default_config_path():
    """Path of the bundled config for the 18x18, 450 MHz, 45 degree crab scene."""
    return Path(__file__).parent / "data" / DEFAULT_CONFIG


@dataclass(frozen=True)
class RadarScenarioConfig:
    """Physical and simulation parameters of one angle-Doppler scene.

    ``cnr_db`` is the total clutter power per element and pulse relative to
    ``noise_power``. ``element_spacing_m=None`` means half a wavelength.
    """

    num_elements: int = 18
    num_pulses: int = 18
    carrier_freq_hz: float = 450e6
    prf_hz: float = 300.0
    element_spacing_m: float | None = None
    platform_speed_mps: float = 50.0
    crab_angle_deg: float = 45.0
    cnr_db: float = 40.0
    snr_db: float = 0.0
    target_doppler_hz: float = -50.0
    target_spatial_freq: float = 0.0
    target_present: bool = True
    num_clutter_patches: int = 361
    backlobe_gain_db: float = 0.0
    clutter_fluctuation: bool = True
    noise_power: float = 1.0
    rng_seed: int = 0
    grid_size: tuple[int, int] = (121, 121)

    def __post_init__(self):
        object.__setattr__(self, "grid_size", tuple(int(g) for g in self.grid_size))
        self.validate()

    def validate(self):
        if self.num_elements < 2 or self.num_pulses < 2:
            raise ValidationError("num_elements and num_pulses must be >= 2")
        if not self.prf_hz > 0:
            raise ValidationError("prf_hz must be > 0")
        if not self.carrier_freq_hz > 0:
            raise ValidationError("carrier_freq_hz must be > 0")
        if self.element_spacing_m is not None and not self.element_spacing_m > 0:
            raise ValidationError("element_spacing_m must be > 0")
        if abs(self.target_doppler_hz) > self.prf_hz / 2:
            raise ValidationError("|target_doppler_hz| must not exceed prf_hz/2")
        if self.num_clutter_patches < 8:
            raise ValidationError("num_clutter_patches must be >= 8")
        if len(self.grid_size) != 2 or min(self.grid_size) < 16:
            raise ValidationError("grid_size must be two dimensions, each >= 16")
        if not self.noise_power > 0:
            raise ValidationError("noise_power must be > 0")
        if self.platform_speed_mps < 0:
            raise ValidationError("platform_speed_mps must be >= 0")
        if not 0 <= self.rng_seed < 2**64:
            raise ValidationError("rng_seed must be a 64-bit unsigned integer")

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_freq_hz

    @property
    def spacing(self):
        return self.wavelength / 2 if self.element_spacing_m is None else self.element_spacing_m

    @property
    def crab_angle(self):
        return math.radians(self.crab_angle_deg)

    @property
    def cnr_linear(self):
        return 10 ** (self.cnr_db / 10)

    @property
    def snr_linear(self):
        return 10 ** (self.snr_db / 10)

    @property
    def backlobe_gain(self):
        return 10 ** (self.backlobe_gain_db / 10)

    @property
    def max_clutter_doppler(self):
        """2v/lambda."""
        return 2 * self.platform_speed_mps / self.wavelength

    @property
    def ridge_slope(self):
        """Brennan's beta = 2 v T_r / d."""
        return 2 * self.platform_speed_mps / (self.prf_hz * self.spacing)

    @property
    def size(self):
        return self.num_elements * self.num_pulses

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class DetectorSettings:
    k_sigma: float = 30.0
    bottom_fraction: float = 0.5
    guard_cols: int = 2
    guard_rows: int = 2
    span_exempt: float = 0.5
    min_region_area: int = 3
    pooled_covariance: bool = False

    def __post_init__(self):
        if not self.k_sigma > 0:
            raise ValidationError("k_sigma must be > 0")
        if not 0 < self.bottom_fraction <= 1:
            raise ValidationError("bottom_fraction must be in (0, 1]")
        if self.guard_cols < 0 or self.guard_rows < 0:
            raise ValidationError("guard widths must be >= 0")
        if self.min_region_area < 1:
            raise ValidationError("min_region_area must be >= 1")


@dataclass(frozen=True)
class TrainingSettings:
    h1_fraction: float = 0.5
    doppler_min_hz: float = 30.0
    doppler_max_hz: float = 120.0
    ridge_exclusion_hz: float = 30.0
    cnr_jitter_db: float = 3.0

    def __post_init__(self):
        if not 0 <= self.h1_fraction <= 1:
            raise ValidationError("h1_fraction must be in [0, 1]")
        if not 0 <= self.doppler_min_hz < self.doppler_max_hz:
            raise ValidationError("need 0 <= doppler_min_hz < doppler_max_hz")
        if self.ridge_exclusion_hz < 0:
            raise ValidationError("ridge_exclusion_hz must be >= 0")
        if self.cnr_jitter_db < 0:
            raise ValidationError("cnr_jitter_db must be >= 0")


@dataclass(frozen=True)
class RunConfig:
    scenario: RadarScenarioConfig = field(default_factory=RadarScenarioConfig)
    detector: DetectorSettings = field(default_factory=DetectorSettings)
    training: TrainingSettings = field(default_factory=TrainingSettings)

    def to_dict(self):
        out = {}
        for name in ("scenario", "detector", "training"):
            section = dataclasses.asdict(getattr(self, name))
            out[name] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in section.items()}
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def digest(self):
        """SHA-256 of the canonical JSON; identifies configs in reports and models."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ValidationError("config root must be a JSON object")
        unknown = set(data) - {"scenario", "detector", "training"}
        if unknown:
            raise ValidationError(f"unknown config section(s): {sorted(unknown)}")
        kinds = {"scenario": RadarScenarioConfig, "detector": DetectorSettings,
                 "training": TrainingSettings}
        parts = {}
        for name, kind in kinds.items():
            section = data.get(name, {})
            if not isinstance(section, dict):
                raise ValidationError(f"config section {name!r} must be an object")
            allowed = {f.name for f in dataclasses.fields(kind)}
            bad = set(section) - allowed
            if bad:
                raise ValidationError(f"unknown field(s) in {name}: {sorted(bad)}")
            try:
                parts[name] = kind(**section)
            except TypeError as exc:
                raise ValidationError(f"{name}: {exc}") from exc
        return cls(**parts)

    @classmethod
    def load(cls, path):
        path = Path(path)
        text = path.read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
        try:
            return cls.from_dict(data)
        except ValidationError as exc:
            raise ValidationError(f"{path}: {exc}") from exc

    def save(self, path):
        Path(path).write_text(self.to_json())
