"""Experiment configuration: a strict YAML file with nested sections.

Unknown keys are rejected (anti-typo), every value is type-checked, and
error messages carry the offending key path so config mistakes are cheap
to find.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .states import FAMILIES
from .teleport import ETA_SQUARED_1DB

KINDS = ("sweep", "surface", "crossing", "baseline", "oracle-check")
CHANNEL_MODELS = ("fixed-grid", "fiber", "satellite")

DEFAULT_T_GRID = [round(0.05 * i, 2) for i in range(1, 21)]
DEFAULT_EPS_GRID = [round(0.01 * i, 2) for i in range(0, 11)]
DEFAULT_BASELINE_R = [0.25, 0.5, 0.75, 1.0, 1.5]


class ConfigError(ValueError):
    """Raised for any malformed or inconsistent configuration."""


@dataclass
class EnsembleConfig:
    kind: str = "coherent"
    sigma: float = 10.0


@dataclass
class ChannelConfig:
    model: str = "fixed-grid"
    # fiber overrides
    loss_db_per_km: float = 0.16
    eps_slope_per_km: float = 5.3e-5
    eps_intercept: float = 6e-4
    # satellite overrides
    altitude_km: float = 500.0
    anchor_points: list = field(
        default_factory=lambda: [[500.0, 0.06], [1460.0, 0.002]])
    eps_range: list = field(default_factory=lambda: [0.014, 0.015])


@dataclass
class GridConfig:
    t_values: list = field(default_factory=lambda: list(DEFAULT_T_GRID))
    eps_value: float = 0.05
    eps_values: list = field(default_factory=lambda: list(DEFAULT_EPS_GRID))
    lengths_km: list = field(default_factory=list)
    search_min_km: float = 10.0
    search_max_km: float = 200.0


@dataclass
class ExperimentConfig:
    kind: str = "sweep"
    families: list = field(default_factory=lambda: list(FAMILIES))
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    eta_squared: float = ETA_SQUARED_1DB
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    seed: int = 0
    output: str = "results.csv"
    json_mirror: bool = False
    baseline_r_values: list = field(
        default_factory=lambda: list(DEFAULT_BASELINE_R))

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind: expected one of {KINDS}, got {self.kind!r}")
        if not self.families:
            raise ConfigError("families: must be non-empty")
        for fam in self.families:
            if fam not in FAMILIES:
                raise ConfigError(
                    f"families: unknown family {fam!r} (known: {FAMILIES})")
        if self.ensemble.kind not in ("coherent", "squeezed"):
            raise ConfigError(
                f"ensemble.kind: expected coherent|squeezed, got "
                f"{self.ensemble.kind!r}")
        if not self.ensemble.sigma > 0:
            raise ConfigError("ensemble.sigma: must be > 0")
        if not 0 < self.eta_squared <= 1:
            raise ConfigError("eta_squared: must be in (0, 1]")
        if self.channel.model not in CHANNEL_MODELS:
            raise ConfigError(
                f"channel.model: expected one of {CHANNEL_MODELS}, got "
                f"{self.channel.model!r}")
        if self.seed < 0:
            raise ConfigError("seed: must be >= 0")
        if self.kind == "sweep":
            if self.channel.model == "fixed-grid" and not self.grid.t_values:
                raise ConfigError("grid.t_values: must be non-empty for sweep")
            if self.channel.model != "fixed-grid" and not self.grid.lengths_km:
                raise ConfigError(
                    "grid.lengths_km: must be non-empty for a distance sweep")
        if self.kind == "surface":
            if not (self.grid.t_values and self.grid.eps_values):
                raise ConfigError(
                    "grid.t_values and grid.eps_values: must be non-empty "
                    "for surface")
        if self.kind in ("crossing", "baseline"):
            if self.channel.model == "fixed-grid":
                raise ConfigError(
                    f"{self.kind}: channel.model must be fiber or satellite")
            if not self.grid.search_min_km < self.grid.search_max_km:
                raise ConfigError(
                    "grid.search_min_km must be < grid.search_max_km")
        if self.kind == "baseline" and not self.baseline_r_values:
            raise ConfigError("baseline_r_values: must be non-empty")
        return self


def _build(cls, data, path):
    """Construct a dataclass from a mapping, rejecting unknown keys."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(data).__name__}")
    fields = {f.name for f in cls.__dataclass_fields__.values()}
    out = {}
    for key, value in data.items():
        if key not in fields:
            raise ConfigError(f"{path}.{key}: unknown key")
        out[key] = value
    return cls(**out)


def parse_config(text, name="<config>"):
    """Parse and validate a YAML config document."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{name}: invalid YAML: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: top level must be a mapping")

    nested = {"ensemble": EnsembleConfig, "channel": ChannelConfig,
              "grid": GridConfig}
    kwargs = {}
    for key, value in data.items():
        if key in nested:
            kwargs[key] = _build(nested[key], value, key)
        elif key in ExperimentConfig.__dataclass_fields__:
            kwargs[key] = value
        else:
            raise ConfigError(f"{key}: unknown key")
    try:
        cfg = ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    # normalize numeric types early so downstream code sees plain floats
    try:
        cfg.eta_squared = float(cfg.eta_squared)
        cfg.ensemble.sigma = float(cfg.ensemble.sigma)
        cfg.seed = int(cfg.seed)
        cfg.grid.eps_value = float(cfg.grid.eps_value)
        cfg.grid.t_values = [float(v) for v in cfg.grid.t_values]
        cfg.grid.eps_values = [float(v) for v in cfg.grid.eps_values]
        cfg.grid.lengths_km = [float(v) for v in cfg.grid.lengths_km]
        cfg.grid.search_min_km = float(cfg.grid.search_min_km)
        cfg.grid.search_max_km = float(cfg.grid.search_max_km)
        cfg.baseline_r_values = [float(v) for v in cfg.baseline_r_values]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: non-numeric value where a number is "
                          f"required ({exc})") from exc
    return cfg.validate()


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), name=str(path))
