"""
Scoring and orchestration for the acceptance evaluation
"""

import json
import yaml
from typing import Dict, Any
from pathlib import Path
from .utils import save_json

SECTIONS = ("convergence", "witness", "accessibility")


def load_scoring_config(config_file: str) -> Dict[str, Any]:
    """Load scoring configuration from YAML file"""
    with open(config_file, 'r') as f:
        config = yaml.safe_load(f)
    return config


def _check(value: Any, gate: Dict[str, Any]) -> Dict[str, Any]:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        return {"status": "FAIL", "expected": "numeric metric", "actual": value}
    if "min" in gate:
        passed = value >= gate["min"]
        expected = f">= {gate['min']}"
    else:
        passed = value <= gate["max"]
        expected = f"<= {gate['max']}"
    return {"status": "PASS" if passed else "FAIL", "expected": expected, "actual": value}


def apply_gates(metrics: Dict[str, Any], config: Dict[str, Any]) -> Dict[str, Any]:
    """Apply pass/fail gates to metrics; a missing metric fails its gate"""
    gates = config.get("gates", {})
    status = "PASS"
    gate_results = {}

    for section, section_gates in gates.items():
        section_metrics = metrics.get(section)
        if section_metrics is None:
            print(f"Warning: no {section} results, skipping its gates")
            continue
        for gate_name, gate_config in section_gates.items():
            result = _check(section_metrics.get(gate_name), gate_config)
            gate_results[f"{section}.{gate_name}"] = result
            if result["status"] == "FAIL":
                status = "FAIL"

    return {
        "status": status,
        "gate_results": gate_results,
    }


def consolidate_metrics(results_dir: str) -> Dict[str, Any]:
    """Load each section's results file that exists"""
    metrics = {}
    for section in SECTIONS:
        path = Path(results_dir) / f"{section}_eval_results.json"
        if path.exists():
            with open(path, 'r') as f:
                metrics[section] = json.load(f)
    return metrics


def run_scoring(results_dir: str, config_file: str, output_file: str) -> Dict[str, Any]:
    """Run scoring and apply gates"""
    print("Consolidating metrics...")
    metrics = consolidate_metrics(results_dir)

    print("Loading scoring configuration...")
    config = load_scoring_config(config_file)

    print("Applying gates...")
    gate_results = apply_gates(metrics, config)

    final_results = {
        **metrics,
        **gate_results
    }

    print(f"Saving final results to {output_file}")
    save_json(final_results, output_file)

    print(f"Scoring complete! Status: {gate_results['status']}")

    for gate_name, result in gate_results["gate_results"].items():
        status_icon = "✅" if result["status"] == "PASS" else "❌"
        actual = result["actual"]
        shown = f"{actual:.4g}" if isinstance(actual, (int, float)) else repr(actual)
        print(f"{status_icon} {gate_name}: {result['status']} (expected: {result['expected']}, actual: {shown})")

    return final_results
