"""
Evaluation B: Majorization Witnesses
Flat-state dimension order, T-transform witness oracle and the
single-observable difference identity
"""

import time
from typing import Any, Dict
from pathlib import Path
import sys
sys.path.append(str(Path(__file__).parent.parent))

import numpy as np

from accessibility.majorization import flat_convertible_at_scale, majorizes_blocks, flat_blocks
from channels.random_maps import majorized_pair, non_majorized_pair
from channels.t_transform import apply_map, t_transform_chain
from channels.vectors import pad_pair
from eval.utils import save_json
from microcanonical.counting import count_report
from models.errors import NotMajorizedError
from spectra.convolution import spectrum_for
from spectra.families import build_model


def flat_order_check(rng: np.random.Generator, pairs: int = 1000, largest: int = 10 ** 6) -> int:
    mismatches = 0
    for _ in range(pairs):
        D, D_prime = (int(v) for v in rng.integers(1, largest + 1, size=2))
        if flat_convertible_at_scale(D, D_prime) != majorizes_blocks(flat_blocks(D), flat_blocks(D_prime)):
            mismatches += 1
    return mismatches


def witness_oracle_check(rng: np.random.Generator, pairs: int = 500, max_size: int = 8) -> Dict[str, Any]:
    failures, false_witnesses, max_error = 0, 0, 0.0
    for _ in range(pairs):
        n = int(rng.integers(2, max_size + 1))
        p, q = majorized_pair(n, rng)
        try:
            T = t_transform_chain(p, q)
        except NotMajorizedError:
            failures += 1
            continue
        p, q = pad_pair(p, q)
        max_error = max(max_error, float(np.abs(apply_map(T, p) - q).sum()))
    for _ in range(pairs):
        n = int(rng.integers(2, max_size + 1))
        p, q = non_majorized_pair(n, rng)
        try:
            t_transform_chain(p, q)
            false_witnesses += 1
        except NotMajorizedError:
            pass
    return {"oracle_failures": failures, "false_witnesses": false_witnesses, "max_l1_error": max_error}


def difference_identity_check(rng: np.random.Generator, samples: int = 1000) -> Dict[str, int]:
    """Shell count against D(a(1+delta)) - D(a(1-delta)) away from eigenvalue boundaries"""
    model = build_model("paramagnet")
    mismatches, skipped = 0, 0
    for _ in range(samples):
        scale = int(rng.integers(8, 513))
        a = round(float(rng.uniform(0.05, 0.95)), 4)
        delta = round(float(rng.uniform(0.01, 0.5)), 4)
        report = count_report(spectrum_for(model, scale), a, delta, scale)
        if report.boundary_hits:
            skipped += 1
            continue
        if not report.agrees:
            mismatches += 1
    return {"difference_identity_mismatches": mismatches, "difference_identity_skipped": skipped}


def run_witness_eval(output_dir: str, seed: int = 0) -> Dict[str, Any]:
    print("=== Witness Evaluation ===")
    rng = np.random.default_rng(seed)

    flat_mismatches = flat_order_check(rng)
    print(f"Flat order mismatches: {flat_mismatches}")

    started = time.perf_counter()
    oracle = witness_oracle_check(rng)
    runtime = time.perf_counter() - started
    print(f"Witness oracle: {oracle} ({runtime:.2f}s)")

    identity = difference_identity_check(rng)
    print(f"Difference identity: {identity}")

    results = {
        "seed": seed,
        "flat_mismatches": flat_mismatches,
        "witness_runtime_seconds": runtime,
        **oracle,
        **identity,
    }
    save_json(results, f"{output_dir}/witness_eval_results.json")
    print(f"Results saved to: {output_dir}/witness_eval_results.json")
    return results
