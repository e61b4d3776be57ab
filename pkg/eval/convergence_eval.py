"""
Evaluation A: Entropy Convergence
Downward-count extrapolation, upper/lower entropy estimates and the
stepwise delta0 schedule on the paramagnet
"""

import time
from typing import Any, Dict, List, Optional
from pathlib import Path
import sys
sys.path.append(str(Path(__file__).parent.parent))

from eval.utils import binary_entropy, save_json
from models.schedule import DeltaSchedule
from regularization.bounds import delta0_schedule, upper_lower_entropy
from regularization.extrapolation import estimate_limit
from regularization.sequence import DOWNWARD, entropy_density_sequence
from spectra.families import build_model

CONVERGENCE_SCALES = [256, 512, 1024, 2048, 4096]
DENSE_SCALES = [256, 384, 512, 768, 1024, 1536, 2048, 3072, 4096]
ESTIMATE_DENSITIES = [0.1, 0.25, 0.4]
DELTA0_EPSILONS = [0.2, 0.1, 0.05]


def schedule_family() -> List[DeltaSchedule]:
    return [
        DeltaSchedule.power(1, "1/2"),
        DeltaSchedule.power("1/10", "1/3"),
        DeltaSchedule.power("1/2", "1/4"),
    ]


def run_convergence_eval(output_dir: str, scales: Optional[List[int]] = None) -> Dict[str, Any]:
    print("=== Convergence Evaluation ===")
    model = build_model("paramagnet")
    scales = scales or CONVERGENCE_SCALES

    # 1. downward counts at a = 0.25
    started = time.perf_counter()
    seq = entropy_density_sequence(model, 0.25, DOWNWARD, scales)
    estimate = estimate_limit(seq, "affine-fit")
    runtime = time.perf_counter() - started
    analytic = binary_entropy(0.25)
    print(f"Affine-fit estimate {estimate.value:.6f} vs h(0.25) = {analytic:.6f} ({runtime:.2f}s)")

    # 2. upper/lower estimates over a schedule family
    estimates = []
    for u in ESTIMATE_DENSITIES:
        upper, lower = upper_lower_entropy(model, u, schedule_family(), DENSE_SCALES)
        reference = binary_entropy(u)
        estimates.append({
            "u": u,
            "upper": upper.value,
            "lower": lower.value,
            "analytic": reference,
            "error": max(abs(upper.value - reference), abs(lower.value - reference)),
            "ordered": lower.value <= upper.value,
        })
        print(f"u={u}: lower {lower.value:.5f} <= upper {upper.value:.5f}, h(u) = {reference:.5f}")

    # 3. delta0 step schedule
    construction = delta0_schedule(model, 0.25, DELTA0_EPSILONS, scales)
    steps = [step.model_dump(mode="json") for step in construction.steps]
    failed = sum(1 for step in construction.steps if not step.holds)
    print(f"delta0 steps: {[(scale, str(eps)) for scale, eps in construction.schedule.table]}")

    results = {
        "entropy_estimate": estimate.value,
        "entropy_error_bar": estimate.error_bar,
        "entropy_analytic": analytic,
        "entropy_error": abs(estimate.value - analytic),
        "runtime_seconds": runtime,
        "estimates": estimates,
        "theorem2_max_error": max(row["error"] for row in estimates),
        "theorem2_order_violations": sum(1 for row in estimates if not row["ordered"]),
        "delta0_table": [[scale, str(eps)] for scale, eps in construction.schedule.table],
        "delta0_steps": steps,
        "delta0_failed_steps": failed,
    }
    save_json(results, f"{output_dir}/convergence_eval_results.json")
    print(f"Results saved to: {output_dir}/convergence_eval_results.json")
    return results
