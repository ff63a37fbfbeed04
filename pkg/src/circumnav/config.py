"""Run configuration: INI-style file with strict sections/keys and defaults.

Defaults describe the headline scenario: orbit radius 10, unit speed,
sigma = 0.5, 350 s runs with a 0.5 s control period.  Unknown sections or
keys are rejected rather than ignored, and every value can be overridden on
the command line with ``--set section.key=value``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace

from .control import ControllerParams, make_params
from .dynamics import NoiseModel, SimConfig, WindModel
from .geometry import PolarState


class ConfigError(ValueError):
    """Bad configuration file, key, or value."""


@dataclass(frozen=True)
class RunConfig:
    # [controller]
    k: float = 1.0
    r_d: float = 10.0
    V: float = 1.0
    # [noise]
    sigma: float = 0.5
    mode: str = "measurement"
    seed: int = 0
    # [wind]
    wind_speed: float = 0.0
    wind_direction: float = 0.0
    # [sim]
    t_final: float = 350.0
    dt_control: float = 0.5
    dt_integ: float = 0.01
    initial_r: float = 20.0
    initial_theta: float = 0.0
    inner_policy: str = "combined"
    # [experiment]
    k_start: float = 0.1
    k_step: float = 0.15
    n_k: int = 20
    runs_per_k: int = 20
    epsilon: float = 0.05
    horizon: float = 500.0


# (section, key) -> RunConfig field name; key case is significant
SCHEMA: dict[tuple[str, str], str] = {
    ("controller", "k"): "k",
    ("controller", "r_d"): "r_d",
    ("controller", "V"): "V",
    ("noise", "sigma"): "sigma",
    ("noise", "mode"): "mode",
    ("noise", "seed"): "seed",
    ("wind", "speed"): "wind_speed",
    ("wind", "direction"): "wind_direction",
    ("sim", "t_final"): "t_final",
    ("sim", "dt_control"): "dt_control",
    ("sim", "dt_integ"): "dt_integ",
    ("sim", "initial_r"): "initial_r",
    ("sim", "initial_theta"): "initial_theta",
    ("sim", "inner_policy"): "inner_policy",
    ("experiment", "k_start"): "k_start",
    ("experiment", "k_step"): "k_step",
    ("experiment", "n_k"): "n_k",
    ("experiment", "runs_per_k"): "runs_per_k",
    ("experiment", "epsilon"): "epsilon",
    ("experiment", "horizon"): "horizon",
}

_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(section: str, key: str, raw: str):
    field = SCHEMA[(section, key)]
    kind = _FIELD_TYPES[field]
    try:
        if kind == "int":
            return field, int(raw)
        if kind == "float":
            return field, float(raw)
        return field, raw
    except ValueError as e:
        raise ConfigError(f"bad value for {section}.{key}: {raw!r} ({e})") from None


def load_config(
    path: str | None = None,
    overrides: list[str] | None = None,
    seed: int | None = None,
) -> RunConfig:
    """Defaults, then the config file, then --set overrides, then --seed."""
    values: dict[str, object] = {}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # keep key case ("V")
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from None
        except configparser.Error as e:
            raise ConfigError(f"malformed config file {path}: {e}") from None
        for section in parser.sections():
            for key, raw in parser.items(section):
                if (section, key) not in SCHEMA:
                    raise ConfigError(f"unknown config key [{section}] {key}")
                field, val = _convert(section, key, raw)
                values[field] = val
    for item in overrides or []:
        target, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        section, dot, key = target.partition(".")
        if not dot or (section, key) not in SCHEMA:
            raise ConfigError(f"unknown config key {target!r} in override")
        field, val = _convert(section, key, raw)
        values[field] = val
    cfg = RunConfig(**values)
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    return cfg


def config_items(cfg: RunConfig) -> list[tuple[str, str, object]]:
    """Effective config as (section, key, value) rows in schema order."""
    return [(s, key, getattr(cfg, field)) for (s, key), field in SCHEMA.items()]


def to_params(cfg: RunConfig) -> ControllerParams:
    return make_params(cfg.k, cfg.r_d, cfg.V)


def to_sim_config(cfg: RunConfig) -> SimConfig:
    """Build the simulation config; raises on infeasible/invalid values."""
    wind = None
    if cfg.wind_speed > 0.0:
        wind = WindModel(w_speed=cfg.wind_speed, w_dir=cfg.wind_direction)
    return SimConfig(
        params=to_params(cfg),
        noise=NoiseModel(sigma=cfg.sigma, mode=cfg.mode, seed=cfg.seed),
        t_final=cfg.t_final,
        dt_control=cfg.dt_control,
        dt_integ=cfg.dt_integ,
        initial=PolarState(cfg.initial_r, cfg.initial_theta),
        wind=wind,
        inner_policy=cfg.inner_policy,
    )
