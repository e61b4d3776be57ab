"""
Evaluation C: Accessibility
Impossibility bound, delta' construction and the verdict suite
"""

import json
import math
from fractions import Fraction
from typing import Any, Dict, List, Sequence
from pathlib import Path
import sys
sys.path.append(str(Path(__file__).parent.parent))

import numpy as np

from accessibility.eta import construct_delta_prime, eta_plus_minus, eta_window
from accessibility.verdicts import VerdictConfig, decide, impossibility_evidence
from channels.random_maps import random_image_distances
from eval.utils import save_json
from models.schedule import DeltaSchedule
from spectra.families import build_model
from storage.run_store import verdict_summary

BOUND_SCALES = [200, 400, 800]
VERDICT_SCALES = [256, 512, 1024, 2048, 4096]
LATTICE_EXPONENTS = range(6, 13)
# shells small enough to realize every image as an explicit vector
IMAGE_SCALE = 8
IMAGE_MAPS = 16

# (source, target, basis) -> expected decision
EXPECTED_VERDICTS = [
    (0.2, 0.4, "theorem1", "possible"),
    (0.2, 0.4, "theorem2", "possible"),
    (0.2, 0.4, "lemma4", "possible"),
    (0.4, 0.2, "theorem1", "impossible"),
    (0.4, 0.2, "theorem2", "impossible"),
    (0.4, 0.2, "lemma4", "impossible"),
    (0.3, 0.3, "theorem1", "possible"),
]


def image_check(model, rng: np.random.Generator) -> Dict[str, Any]:
    """Distances of random unital images of the flat source shell against the bound, at a small scale"""
    config = VerdictConfig.with_defaults([IMAGE_SCALE], [DeltaSchedule.constant("1/2")])
    row = impossibility_evidence(model, 0.4, 0.2, config)[0]
    distances = random_image_distances(row.dimension, row.dimension_prime, rng, IMAGE_MAPS,
                                       map_tolerance=config.map_tolerance)
    return {
        "image_shells": [row.dimension, row.dimension_prime],
        "image_bound": row.bound,
        "image_min_distance": min(distances),
        "image_violations": sum(1 for d in distances if d < row.bound - 1e-10),
    }


def bound_check(model, rng: np.random.Generator) -> Dict[str, Any]:
    schedule = DeltaSchedule.power(1, "1/3")
    config = VerdictConfig.with_defaults(BOUND_SCALES, [schedule])
    rows = impossibility_evidence(model, 0.4, 0.2, config)
    violations = sum(1 for row in rows if row.trace_distance is None or row.trace_distance < row.bound - 1e-10)
    below = sum(1 for row in rows if row.trace_distance is None or row.trace_distance < 1 / 3)
    return {
        "bound_rows": [row.model_dump(mode="json") for row in rows],
        "bound_violations": violations,
        "below_one_third": below,
        **image_check(model, rng),
    }


def delta_prime_check(model, exponents: Sequence[int] = LATTICE_EXPONENTS) -> Dict[str, Any]:
    window = eta_window(model, 0.3, 0.3, 0.1, 10)
    eta_plus, eta_minus = eta_plus_minus(window)
    single = construct_delta_prime(model, 0.3, 0.3, DeltaSchedule.constant("1/10"), [10])
    exact = (
        window.lo == Fraction(-1, 3)
        and window.hi == Fraction(1, 3)
        and eta_plus == Fraction(1, 9)
        and eta_minus == Fraction(-1, 9)
        and single.steps[0].delta_prime == Fraction(4, 9)
    )

    gas = build_model("lattice-gas")
    scales = [2 ** k for k in exponents]
    construction = construct_delta_prime(gas, (0.4, 0.3), (0.4, 0.3), DeltaSchedule.power(1, "1/4"), scales)
    table = construction.schedule.table if construction.schedule is not None else ()
    return {
        "delta_prime_exact": 1 if exact else 0,
        "lattice_scales": scales,
        "lattice_delta_prime": [[scale, str(value)] for scale, value in table],
        "delta_prime_trend_slope": construction.trend_slope,
        "sandwich_failures": len(construction.failed_scales()),
    }


def verdict_check(model) -> Dict[str, Any]:
    schedules = [DeltaSchedule.power("1/10", "1/3"), DeltaSchedule.power(1, "1/2")]
    config = VerdictConfig.with_defaults(VERDICT_SCALES, schedules)
    rows: List[Dict[str, Any]] = []
    mismatches, nondeterministic = 0, 0
    for source, target, basis, expected in EXPECTED_VERDICTS:
        first = decide(model, source, target, basis, config, schedules[0], schedules[1])
        second = decide(model, source, target, basis, config, schedules[0], schedules[1])
        same = json.dumps(verdict_summary(first), sort_keys=True) == json.dumps(verdict_summary(second), sort_keys=True)
        nondeterministic += 0 if same else 1
        mismatches += 0 if first.decision == expected else 1
        rows.append({"source": source, "target": target, "basis": basis, "expected": expected,
                     "decision": first.decision, "branch": first.branch})
        print(f"  ({source}) -> ({target}) [{basis}]: {first.decision} (expected {expected})")
    return {"verdicts": rows, "verdict_mismatches": mismatches, "nondeterministic": nondeterministic}


def run_accessibility_eval(output_dir: str, seed: int = 0) -> Dict[str, Any]:
    print("=== Accessibility Evaluation ===")
    model = build_model("paramagnet")

    bounds = bound_check(model, np.random.default_rng(seed))
    print(f"Bound violations: {bounds['bound_violations']}, below 1/3: {bounds['below_one_third']}, "
          f"image violations: {bounds['image_violations']}")

    delta_prime = delta_prime_check(model)
    slope = delta_prime["delta_prime_trend_slope"]
    print(f"delta' exact: {bool(delta_prime['delta_prime_exact'])}, lattice trend slope: "
          f"{slope if slope is None else round(slope, 4)}")

    verdicts = verdict_check(model)

    results = {"seed": seed, **bounds, **delta_prime, **verdicts}
    if results["delta_prime_trend_slope"] is None:
        results["delta_prime_trend_slope"] = math.inf
    save_json(results, f"{output_dir}/accessibility_eval_results.json")
    print(f"Results saved to: {output_dir}/accessibility_eval_results.json")
    return results
