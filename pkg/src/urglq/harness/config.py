"""Scenario configuration, presets and config-file loading."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import yaml

from ..arraymodel import (ArrayGeometry, GainPhase, MismatchModel, NoMismatch, RandomDoa,
                          SvRandomError, mismatch_from_dict, mismatch_to_dict)
from ..errors import ConfigurationError, DomainError

METHODS = ("optimal", "smi", "linear", "urglq", "urglq-nocorr")


@dataclass(frozen=True)
class ScenarioConfig:
    """One Monte Carlo study. Every grid point is ``(snr_db, snapshots)``."""

    geometry: ArrayGeometry = field(default_factory=ArrayGeometry)
    desired_doa: float = 10.0
    interference_doas: Tuple[float, ...] = (-30.0, 40.0)
    inr_db: float = 20.0
    snr_grid_db: Tuple[float, ...] = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    snapshot_grid: Tuple[int, ...] = (30,)
    trials: int = 300
    mismatch: MismatchModel = field(default_factory=NoMismatch)
    methods: Tuple[str, ...] = ("optimal", "smi", "linear", "urglq")
    seed: int = 0
    L: int = 20
    half_width: float = 8.0
    noise_power: float = 1.0
    alpha: Optional[float] = None
    perturb_interference: Optional[bool] = None
    workers: Optional[int] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if not self.snr_grid_db or not self.snapshot_grid:
            raise ConfigurationError("SNR and snapshot grids must be nonempty")
        if any(int(k) != k or k < 1 for k in self.snapshot_grid):
            raise ConfigurationError("snapshot counts must be positive integers")
        if self.seed < 0:
            raise ConfigurationError("seed must be an unsigned integer")
        if self.L < 1:
            raise ConfigurationError("L must be >= 1")
        if not self.half_width > 0:
            raise ConfigurationError("half_width must be positive")
        if self.alpha is not None and self.alpha < 10:
            raise ConfigurationError("alpha must be >= 10 (or unset for 100 trace(R_hat))")
        for m in self.methods:
            if m not in METHODS and not m.startswith("urglq-riemann:"):
                raise ConfigurationError(f"unknown method {m!r}; expected one of {METHODS} or urglq-riemann:<L>")
        for doa in self.interference_doas:
            if abs(doa - self.desired_doa) <= self.half_width:
                raise ConfigurationError(
                    f"interference interval around {doa:g} contains the desired DOA {self.desired_doa:g}; "
                    "shrink half_width"
                )

    @property
    def perturbs_interference(self) -> bool:
        """Whether the mismatch also hits interferer steering vectors.

        Unset means: DOA errors move every source, while sensor gain/phase
        errors and additive steering errors are applied to the desired signal only.
        """
        if self.perturb_interference is not None:
            return bool(self.perturb_interference)
        return isinstance(self.mismatch, RandomDoa)

    @property
    def grid(self):
        return [(float(snr), int(k)) for snr in self.snr_grid_db for k in self.snapshot_grid]

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d["geometry"] = {"num_sensors": self.geometry.num_sensors, "spacing": self.geometry.spacing}
        d["mismatch"] = mismatch_to_dict(self.mismatch)
        for k in ("interference_doas", "snr_grid_db", "snapshot_grid", "methods"):
            d[k] = list(d[k])
        return d


_TUPLE_FIELDS = {"interference_doas": float, "snr_grid_db": float, "snapshot_grid": int, "methods": str}


def config_from_dict(data: dict, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Overlay ``data`` (keys are :class:`ScenarioConfig` field names) on ``base``."""
    base = base or ScenarioConfig()
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    changes = {}
    for key, value in data.items():
        if key == "geometry":
            value = ArrayGeometry(**value) if isinstance(value, dict) else value
        elif key == "mismatch":
            value = mismatch_from_dict(value)
        elif key in _TUPLE_FIELDS:
            if isinstance(value, (int, float, str)):
                value = [value]
            value = tuple(_TUPLE_FIELDS[key](v) for v in value)
        changes[key] = value
    try:
        return dataclasses.replace(base, **changes)
    except (TypeError, DomainError) as exc:
        raise ConfigurationError(str(exc)) from exc


def load_config(path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Read a YAML (or JSON) scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return config_from_dict(data, base)


# Presets for the simulation studies. Each only changes what differs from the
# built-in defaults.
SCENARIOS = {
    "ideal": {},
    "doa-mismatch": {"mismatch": RandomDoa(4.0)},
    "gain-phase": {"mismatch": GainPhase(0.05, 0.025 * math.pi)},
    "sv-error": {"mismatch": SvRandomError(math.sqrt(0.3))},
    # +-8 degree intervals around -5 and 15 would cover the desired DOA at 5
    "closer-angles": {"desired_doa": 5.0, "interference_doas": (-5.0, 15.0), "half_width": 4.0},
}


def scenario_config(name: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    try:
        preset = SCENARIOS[name]
    except KeyError:
        raise ConfigurationError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}")
    return (base or ScenarioConfig()).replace(**preset)
