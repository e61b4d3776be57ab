import copy
import json
import os
from functools import lru_cache
from typing import Any, Dict

from dotenv import load_dotenv

FALLBACK_DEFAULTS: Dict[str, Any] = {
    "spectrum_cap": 2_000_000,
    "chain_cap": 4096,
    "map_tolerance": 1e-12,
    "witness_tolerance": 1e-9,
    "normalization_tolerance": 1e-12,
    "margin_floor": 1e-4,
    "slope_threshold": 1e-6,
    "bump_size": 0.01,
    "tail_fraction": 0.5,
    "convention": "multiplicative",
    "eta_scan_range": [-1, 1],
    "scale_grid": {"start": 256, "ratio": 2, "count": 5},
}

# environment variable -> (key, parser)
ENV_OVERRIDES = {
    "ADIABATIC_SPECTRUM_CAP": ("spectrum_cap", int),
    "ADIABATIC_CHAIN_CAP": ("chain_cap", int),
    "ADIABATIC_MAP_TOLERANCE": ("map_tolerance", float),
    "ADIABATIC_WITNESS_TOLERANCE": ("witness_tolerance", float),
}


def load_defaults() -> Dict[str, Any]:
    """Load default numerical settings, then apply optional environment overrides"""
    config_path = os.path.join(os.path.dirname(__file__), "defaults.json")

    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            defaults = {**copy.deepcopy(FALLBACK_DEFAULTS), **json.load(f)}
    except Exception as e:
        print(f"Error loading defaults: {e}")
        defaults = copy.deepcopy(FALLBACK_DEFAULTS)

    load_dotenv()
    for variable, (key, parse) in ENV_OVERRIDES.items():
        raw = os.getenv(variable)
        if raw is None or raw == "":
            continue
        try:
            defaults[key] = parse(raw)
        except ValueError:
            print(f"Ignoring {variable}={raw!r}: not a valid {parse.__name__}")

    return defaults


@lru_cache(maxsize=1)
def get_defaults() -> Dict[str, Any]:
    """Process-wide copy of load_defaults(); treat the result as read-only"""
    return load_defaults()
