"""JSON configuration: the single source of simulation defaults.

Precedence, lowest to highest: built-in defaults, config file, CLI flags.
The captioner endpoint can additionally be overridden through the
``CAMSIM_CAPTIONER_ENDPOINT`` environment variable.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os

from .core import SensorModel, SensorSpec

ENDPOINT_ENV_VAR = "CAMSIM_CAPTIONER_ENDPOINT"

DEFAULT_CONFIG: dict = {
    "sensor": {
        "quantum_efficiency": 0.6,
        "dark_current": 0.01,
        "read_noise": 2.0,
        "gamma": 2.2,
        "adc_bits": 10,
        "base_exposure": 0.2,
        "photon_scale": 10000.0,
    },
    "focal": {
        "sensor_width_mm": 36.0,
        "sensor_height_mm": 24.0,
        "base_focal_mm": 24.0,
        "out_width": 512,
        "out_height": 384,
    },
    "bokeh": {
        "focus_percentile": 95.0,
        "tau": 0.2,
        "tau_leak": 0.05,
        "depth_epsilon": 1e-3,
    },
    "exposure": {
        "stochastic": False,
    },
    "captioner": {
        "endpoint": None,
    },
    "quality_gates": {
        "focal_min_short_side": 3000,
        "bokeh_min_disparity_spread": 0.3,
        "luma_min": 0.25,
        "luma_max": 0.75,
    },
}


def deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path=None, overrides: dict | None = None) -> dict:
    """Merge defaults <- config file <- overrides."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            config = deep_merge(config, json.load(fh))
    if overrides:
        config = deep_merge(config, overrides)
    return config


def config_hash(config: dict) -> str:
    """Stable digest of a config for reproducibility stamps."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def sensor_model_from(config: dict) -> SensorModel:
    s = config["sensor"]
    return SensorModel(
        quantum_efficiency=s["quantum_efficiency"],
        dark_current=s["dark_current"],
        read_noise=s["read_noise"],
        gamma=s["gamma"],
        adc_bits=s["adc_bits"],
        base_exposure=s["base_exposure"],
        photon_scale=s["photon_scale"],
        full_well=s.get("full_well"),
        conversion_gain=s.get("conversion_gain"),
    )


def sensor_spec_from(config: dict) -> SensorSpec:
    f = config["focal"]
    return SensorSpec(
        width_mm=f["sensor_width_mm"],
        height_mm=f["sensor_height_mm"],
        base_focal_mm=f["base_focal_mm"],
    )


def captioner_endpoint(config: dict) -> str | None:
    return os.environ.get(ENDPOINT_ENV_VAR) or config["captioner"]["endpoint"]
