import json
import math

import numpy as np
import pytest

from eval.accessibility_eval import bound_check, delta_prime_check
from eval.scoring import _check, apply_gates, consolidate_metrics, run_scoring
from eval.utils import binary_entropy, load_json, save_json
from eval.witness_eval import difference_identity_check, flat_order_check, witness_oracle_check

GATES = {"gates": {"witness": {"flat_mismatches": {"max": 0}, "max_l1_error": {"max": 1e-9}},
                   "accessibility": {"delta_prime_exact": {"min": 1}}}}


class TestGates:
    def test_all_pass(self):
        metrics = {"witness": {"flat_mismatches": 0, "max_l1_error": 1e-12}, "accessibility": {"delta_prime_exact": 1}}
        result = apply_gates(metrics, GATES)
        assert result["status"] == "PASS"
        assert len(result["gate_results"]) == 3

    def test_one_failure_fails_run(self):
        metrics = {"witness": {"flat_mismatches": 2, "max_l1_error": 1e-12}, "accessibility": {"delta_prime_exact": 1}}
        result = apply_gates(metrics, GATES)
        assert result["status"] == "FAIL"
        assert result["gate_results"]["witness.flat_mismatches"]["status"] == "FAIL"

    def test_missing_metric_fails(self):
        metrics = {"witness": {"flat_mismatches": 0}, "accessibility": {"delta_prime_exact": 1}}
        assert apply_gates(metrics, GATES)["gate_results"]["witness.max_l1_error"]["status"] == "FAIL"

    def test_missing_section_is_skipped(self):
        result = apply_gates({"accessibility": {"delta_prime_exact": 1}}, GATES)
        assert result["status"] == "PASS"
        assert list(result["gate_results"]) == ["accessibility.delta_prime_exact"]

    def test_booleans_are_not_metrics(self):
        assert _check(True, {"max": 1})["status"] == "FAIL"

    def test_scoring_round(self, tmp_path):
        save_json({"flat_mismatches": 0, "max_l1_error": 0.0}, str(tmp_path / "witness_eval_results.json"))
        config = tmp_path / "scoring.yaml"
        config.write_text("gates:\n  witness:\n    flat_mismatches: {max: 0}\n")
        assert set(consolidate_metrics(str(tmp_path))) == {"witness"}
        final = run_scoring(str(tmp_path), str(config), str(tmp_path / "final.json"))
        assert final["status"] == "PASS"
        assert load_json(str(tmp_path / "final.json"))["status"] == "PASS"


class TestUtils:
    def test_binary_entropy(self):
        assert binary_entropy(0.5) == pytest.approx(math.log(2))
        assert binary_entropy(0.25) == pytest.approx(0.5623, abs=1e-4)
        assert binary_entropy(0.0) == 0.0

    def test_save_json_sorted(self, tmp_path):
        path = tmp_path / "nested" / "out.json"
        save_json({"b": 1, "a": 2}, str(path))
        assert path.read_text().index('"a"') < path.read_text().index('"b"')
        assert json.loads(path.read_text()) == {"a": 2, "b": 1}


class TestChecks:
    def test_flat_order(self):
        assert flat_order_check(np.random.default_rng(1), pairs=100) == 0

    def test_witness_oracle(self):
        result = witness_oracle_check(np.random.default_rng(2), pairs=25, max_size=6)
        assert result["oracle_failures"] == 0
        assert result["false_witnesses"] == 0
        assert result["max_l1_error"] <= 1e-9

    def test_difference_identity(self):
        result = difference_identity_check(np.random.default_rng(3), samples=40)
        assert result["difference_identity_mismatches"] == 0

    def test_bounds(self, paramagnet):
        result = bound_check(paramagnet, np.random.default_rng(4))
        assert result["bound_violations"] == 0
        assert result["below_one_third"] == 0
        assert result["image_shells"] == [154, 36]
        assert result["image_violations"] == 0
        assert result["image_min_distance"] >= result["image_bound"] - 1e-10

    def test_delta_prime(self, paramagnet):
        result = delta_prime_check(paramagnet, range(6, 10))
        assert result["delta_prime_exact"] == 1
        assert result["sandwich_failures"] == 0
        assert result["delta_prime_trend_slope"] < 0
