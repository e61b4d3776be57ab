"""
Utility functions for the acceptance evaluation
"""

import json
import math
from pathlib import Path
from typing import Any, Dict


def load_json(file_path: str) -> Dict[str, Any]:
    with open(file_path, 'r', encoding='utf-8') as f:
        return json.load(f)


def save_json(data: Dict[str, Any], file_path: str):
    """Save results with sorted keys so reruns diff cleanly"""
    Path(file_path).parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def binary_entropy(u: float) -> float:
    """h(u) = -u ln u - (1-u) ln(1-u), in nats"""
    if u <= 0 or u >= 1:
        return 0.0
    return -u * math.log(u) - (1 - u) * math.log(1 - u)


def timestamp_dir() -> str:
    """Generate timestamped directory name"""
    from datetime import datetime
    return datetime.now().strftime("%Y%m%d_%H%M%S")
