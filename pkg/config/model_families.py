import copy
import json
import os
from typing import Any, Dict

FALLBACK_FAMILIES: Dict[str, Any] = {
    "paramagnet": {
        "description": "Independent two-level spins; the energy counts excited sites.",
        "num_observables": 1,
        "site_table": [[0], [1]],
        "parameters": {},
    },
    "lattice-gas": {
        "description": "Sites empty, holding species one (energy 1) or species two (energy e2); "
                       "observables are energy and particle number.",
        "num_observables": 2,
        "site_table": [[0, 0], [1, 1], ["e2", 1]],
        "parameters": {"e2": 2},
    },
    "oscillator-chain": {
        "description": "Independent oscillators truncated at q_max quanta; the energy counts quanta.",
        "num_observables": 1,
        "generator": "quanta",
        "parameters": {"q_max": 3},
    },
}


def load_model_families() -> Dict[str, Any]:
    """Load the built-in model family registry"""
    config_path = os.path.join(os.path.dirname(__file__), "model_families.json")

    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except Exception as e:
        print(f"Error loading model families: {e}")
        return copy.deepcopy(FALLBACK_FAMILIES)
