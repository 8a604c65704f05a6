"""``key = value`` experiment configuration files.

Unspecified keys take the default system parameters (16x16 arrays, 6
clusters of 8 rays, 20 degree spread, arrays 2 wavelengths apart at pi/6,
5 dB Rician factor, unit step, 1e-5 tolerance, 1000 trials). Keys ending in
``_db`` are in decibels; everything else is linear.
"""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from .channel import ArrayGeometry, ClusterParams, RicianParams
from .montecarlo import ExperimentConfig
from .optimizer import Constraint, Init, OptimizerConfig


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def _pos_int(text):
    return int(text)


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


KEYS = {
    "n_tx": _pos_int,
    "n_rx": _pos_int,
    "n_clusters": _pos_int,
    "n_rays": _pos_int,
    "angular_spread_deg": float,
    "spacing_lambda": float,
    "separation_lambda": float,
    "array_angle_rad": float,
    "kappa_db": float,
    "snr_db": float,
    "sir_db": float,
    "si_power_db": float,
    "step0": float,
    "epsilon": float,
    "max_iters": _pos_int,
    "constraint": _choice(*(c.value for c in Constraint)),
    "init": _choice(*(i.value for i in Init)),
    "trials": _pos_int,
    "scenario": _choice("two_node", "relay"),
    "relay_n": _pos_int,
    "ue_tx": _pos_int,
    "ue_rx": _pos_int,
}


def _values_of(cfg: ExperimentConfig) -> dict:
    g, c, o = cfg.geometry, cfg.clusters, cfg.optimizer
    return {
        "n_tx": g.n_tx,
        "n_rx": g.n_rx,
        "n_clusters": c.n_cl,
        "n_rays": c.n_ray,
        "angular_spread_deg": float(np.rad2deg(c.angular_spread)),
        "spacing_lambda": g.spacing,
        "separation_lambda": g.separation,
        "array_angle_rad": g.angle,
        "kappa_db": float(10 * np.log10(cfg.rician.kappa)) if cfg.rician.kappa > 0 else float("-inf"),
        "snr_db": cfg.snr_db,
        "sir_db": cfg.sir_db,
        "si_power_db": cfg.si_power_db,
        "step0": o.step0,
        "epsilon": o.epsilon,
        "max_iters": o.max_iters,
        "constraint": o.constraint.value,
        "init": o.init.value,
        "trials": cfg.trials,
        "scenario": cfg.scenario,
        "relay_n": cfg.relay_n,
        "ue_tx": cfg.ue_tx,
        "ue_rx": cfg.ue_rx,
    }


def build_config(values: dict, base: ExperimentConfig = ExperimentConfig()) -> ExperimentConfig:
    """Apply ``values`` (config-key -> parsed value) on top of ``base``."""
    v = {**_values_of(base), **values}
    geometry = ArrayGeometry(
        n_tx=v["n_tx"],
        n_rx=v["n_rx"],
        spacing=v["spacing_lambda"],
        separation=v["separation_lambda"],
        angle=v["array_angle_rad"],
    )
    clusters = ClusterParams(v["n_clusters"], v["n_rays"], float(np.deg2rad(v["angular_spread_deg"])))
    rician = RicianParams(float(10 ** (v["kappa_db"] / 10)))
    optimizer = OptimizerConfig(
        step0=v["step0"],
        epsilon=v["epsilon"],
        max_iters=v["max_iters"],
        init=v["init"],
        constraint=v["constraint"],
    )
    return replace(
        base,
        scenario=v["scenario"],
        geometry=geometry,
        clusters=clusters,
        rician=rician,
        snr_db=v["snr_db"],
        sir_db=v["sir_db"],
        si_power_db=v["si_power_db"],
        relay_n=v["relay_n"],
        ue_tx=v["ue_tx"],
        ue_rx=v["ue_rx"],
        optimizer=optimizer,
        trials=v["trials"],
    )


def parse_assignments(text: str) -> tuple[dict, dict]:
    """Parsed values and the line each key was set on."""
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, text_value = (part.strip() for part in line.partition("="))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[key]})", lineno, key)
        try:
            values[key] = KEYS[key](text_value)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {key} = {text_value!r}: {exc}", lineno, key) from None
        lines[key] = lineno
    return values, lines


def parse_config(text: str) -> ExperimentConfig:
    cfg, _ = parse_config_keys(text)
    return cfg


def parse_config_keys(text: str) -> tuple[ExperimentConfig, frozenset[str]]:
    """Like :func:`parse_config`, also returning the keys the file set explicitly."""
    values, lines = parse_assignments(text)
    # validate one key at a time so a violation can be pinned to its line
    for key, value in values.items():
        try:
            build_config({key: value})
        except ValueError as exc:
            raise ConfigError(f"invalid {key} = {value!r}: {exc}", lines[key], key) from None
    try:
        cfg = build_config(values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg, frozenset(values)


def format_config(cfg: ExperimentConfig) -> str:
    lines = []
    for key, value in _values_of(cfg).items():
        if isinstance(value, float):
            value = repr(float(value))
        lines.append(f"{key} = {value}\n")
    return "".join(lines)
