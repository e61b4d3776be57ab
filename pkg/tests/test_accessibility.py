import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from accessibility.eta import construct_delta_prime, eta_plus_minus, eta_window
from accessibility.majorization import blocks_of, flat_blocks, flat_convertible_at_scale, majorizes, majorizes_blocks
from accessibility.verdicts import VerdictConfig, decide, impossibility_evidence, verdict_finite_scale, verdict_theorem1
from channels.random_maps import majorized_pair, non_majorized_pair, random_doubly_stochastic
from channels.t_transform import apply_map, t_transform_chain
from config.scenario_loader import load_scenario
from microcanonical.counting import downward_dimension
from models.errors import DegenerateWindowError, NotMajorizedError, ValidationFailure
from models.macrostate import Macrostate, ShellConvention
from models.schedule import DeltaSchedule
from models.verdict import EtaWindow, Verdict
from regularization.bounds import geometric_scales
from spectra.convolution import spectrum_for


class TestMajorization:
    def test_two_level_examples(self):
        assert majorizes([0.7, 0.3], [0.6, 0.4])
        assert not majorizes([0.6, 0.4], [0.7, 0.3])

    def test_pure_and_flat_extremes(self):
        flat = [0.25] * 4
        assert majorizes([1, 0, 0, 0], flat)
        assert not majorizes(flat, [1, 0, 0, 0])

    def test_flat_dimensions(self):
        assert flat_convertible_at_scale(6, 11)
        assert not flat_convertible_at_scale(12, 11)
        assert flat_convertible_at_scale(11, 11)

    def test_flat_dimension_validation(self):
        with pytest.raises(ValidationFailure):
            flat_convertible_at_scale(0, 3)
        with pytest.raises(ValidationFailure):
            flat_convertible_at_scale(True, 3)

    def test_flat_blocks_match_dimension_order(self, rng):
        for _ in range(200):
            d, d_prime = (int(v) for v in rng.integers(1, 10 ** 6, size=2))
            assert majorizes_blocks(flat_blocks(d), flat_blocks(d_prime)) == (d <= d_prime)

    def test_blocks_of_groups_repeats(self):
        assert blocks_of(np.array([0.25, 0.5, 0.25, 0.0])) == [(0.5, 1), (0.25, 2)]

    def test_reflexive(self, rng):
        for n in (2, 5, 9):
            p, _ = majorized_pair(n, rng)
            assert majorizes(p, p)

    def test_transitive(self, rng):
        for n in (3, 6):
            p, q = majorized_pair(n, rng)
            r = apply_map(random_doubly_stochastic(n, rng), q)
            assert majorizes(p, q)
            assert majorizes(q, r)
            assert majorizes(p, r)

    def test_oracle_matches_witness(self, rng):
        for n in (2, 4, 7):
            for _ in range(20):
                p, q = majorized_pair(n, rng)
                assert majorizes(p, q)
                t_transform_chain(p, q)
            p, q = non_majorized_pair(n, rng)
            with pytest.raises(NotMajorizedError):
                t_transform_chain(p, q)


class TestEtaWindow:
    def test_hand_counted_window(self, paramagnet):
        window = eta_window(paramagnet, 0.3, 0.3, 0.1, 10)
        assert window.lower_bound == 56
        assert window.upper_bound == 176
        assert not window.empty
        assert window.lo == Fraction(-1, 3)
        assert window.hi == Fraction(1, 3)
        assert not window.lo_clamped and not window.hi_clamped

    def test_eta_plus_minus(self, paramagnet):
        window = eta_window(paramagnet, 0.3, 0.3, 0.1, 10)
        assert eta_plus_minus(window) == (Fraction(1, 9), Fraction(-1, 9))

    def test_empty_window_uses_jump(self):
        window = EtaWindow(scale=10, lo=math.inf, hi=-math.inf, empty=True, eta_boundary=Fraction(1, 5))
        eta_plus, eta_minus = eta_plus_minus(window)
        assert eta_plus == Fraction(3, 10)
        assert eta_minus == Fraction(1, 10)

    def test_empty_window_needs_boundary(self):
        with pytest.raises(ValueError):
            EtaWindow(scale=10, lo=math.inf, hi=-math.inf, empty=True)

    def test_saturated_bounds_clamp(self, paramagnet):
        window = eta_window(paramagnet, 0.5, 0.5, 1, 10)
        assert window.lower_bound == 1
        assert window.upper_bound == 1024
        assert window.lo == -1
        assert window.hi == 1
        assert window.hi_clamped
        assert not window.lo_clamped

    def test_window_counts_sandwich(self, paramagnet):
        scale, delta = 64, Fraction(1, 8)
        window = eta_window(paramagnet, 0.3, 0.3, delta, scale)
        spectrum = spectrum_for(paramagnet, scale)
        a = Macrostate.coerce(0.3)
        for eta in (window.lo, (window.lo + window.hi) / 2):
            count = downward_dimension(spectrum, a.scaled(1 + eta), scale)
            assert window.lower_bound <= count <= window.upper_bound
        assert downward_dimension(spectrum, a.scaled(1 + window.hi), scale) > window.upper_bound

    def test_unreachable_lower_bound_is_degenerate(self, paramagnet):
        with pytest.raises(DegenerateWindowError):
            eta_window(paramagnet, 0.3, 0, 0.1, 10)

    def test_rejects_additive_convention(self, paramagnet):
        with pytest.raises(ValidationFailure):
            eta_window(paramagnet, 0.3, 0.3, 0.1, 10, convention=ShellConvention(mode="additive"))

    def test_rejects_nonpositive_delta(self, paramagnet):
        with pytest.raises(ValidationFailure):
            eta_window(paramagnet, 0.3, 0.3, 0, 10)


class TestDeltaPrime:
    def test_hand_counted_step(self, paramagnet):
        construction = construct_delta_prime(paramagnet, 0.3, 0.3, DeltaSchedule.constant(0.1), [10])
        step = construction.steps[0]
        assert step.delta_prime == Fraction(4, 9)
        assert step.upper_sandwich and step.lower_sandwich
        assert construction.verified
        assert construction.schedule.table == ((10, Fraction(4, 9)),)

    def test_decreasing_along_power_schedule(self, paramagnet):
        construction = construct_delta_prime(paramagnet, 0.3, 0.3, DeltaSchedule.power(1, "1/4"), [64, 128, 256, 512])
        assert construction.verified
        assert construction.decreasing
        assert construction.trend_slope < 0

    def test_degenerate_scale_kept_as_note(self, paramagnet):
        construction = construct_delta_prime(paramagnet, 0.3, 0, DeltaSchedule.constant(0.1), [10])
        assert construction.schedule is None
        assert not construction.verified
        assert construction.steps[0].note
        assert construction.failed_scales() == [10]


@pytest.fixture(scope="module")
def demo_config():
    schedules = [DeltaSchedule.power(1, "1/4"), DeltaSchedule.power(1, "1/2"), DeltaSchedule.power("1/10", "1/3")]
    return VerdictConfig.with_defaults(geometric_scales(), schedules)


class TestVerdicts:
    @pytest.mark.parametrize("basis", ["theorem1", "theorem2", "lemma4", "finite-scale"])
    def test_higher_entropy_target_is_reachable(self, paramagnet, demo_config, basis):
        verdict = decide(paramagnet, 0.2, 0.4, basis, demo_config)
        assert verdict.decision == "possible"
        assert verdict.basis == basis

    @pytest.mark.parametrize("basis", ["theorem1", "theorem2", "lemma4", "finite-scale"])
    def test_lower_entropy_target_is_not(self, paramagnet, demo_config, basis):
        verdict = decide(paramagnet, 0.4, 0.2, basis, demo_config)
        assert verdict.decision == "impossible"
        assert verdict.scale_evidence
        for row in verdict.scale_evidence:
            assert row.convertible is False
            assert row.exceeds_one_third

    def test_strict_gap_carries_margin(self, paramagnet, demo_config):
        verdict = decide(paramagnet, 0.2, 0.4, "theorem1", demo_config)
        assert verdict.branch == "strict-gap"
        assert verdict.gap > verdict.margin > 0

    def test_self_pair_uses_delta_prime(self, paramagnet, demo_config):
        verdict = decide(paramagnet, 0.3, 0.3, "theorem1", demo_config)
        assert verdict.branch == "equal-entropy"
        assert verdict.decision == "possible"
        assert verdict.delta_prime.verified

    def test_self_pair_two_sided_is_indeterminate(self, paramagnet, demo_config):
        assert decide(paramagnet, 0.3, 0.3, "theorem2", demo_config).decision == "indeterminate"

    def test_additive_equal_entropy_is_indeterminate(self, paramagnet):
        config = VerdictConfig.with_defaults(
            geometric_scales(), [DeltaSchedule.power(1, "1/2")], convention=ShellConvention(mode="additive")
        )
        verdict = decide(paramagnet, 0.3, 0.3, "theorem1", config)
        assert verdict.decision == "indeterminate"
        assert verdict.branch == "equal-entropy"

    def test_evidence_rows(self, paramagnet, demo_config):
        rows = impossibility_evidence(paramagnet, 0.4, 0.2, demo_config)
        assert [row.scale for row in rows] == demo_config.scales
        for row in rows:
            assert row.dimension > row.dimension_prime
            assert row.trace_distance == pytest.approx(1 - row.dimension_prime / row.dimension)
            assert 0 < row.bound <= 0.5

    def test_unknown_basis(self, paramagnet, demo_config):
        with pytest.raises(ValidationFailure):
            decide(paramagnet, 0.2, 0.4, "theorem3", demo_config)

    def test_finite_scale_possible_needs_support(self):
        with pytest.raises(ValueError):
            Verdict(source=Macrostate.coerce(0.2), target=Macrostate.coerce(0.4), decision="possible",
                    basis="finite-scale")

    def test_min_scale_defaults_to_smallest(self, demo_config):
        assert demo_config.x0 == 256
        assert demo_config.family_ids == ["power-c1-a1_4", "power-c1-a1_2", "power-c1_10-a1_3"]

    def test_strict_gap_links_compose(self, paramagnet):
        config = VerdictConfig.with_defaults(geometric_scales(), [DeltaSchedule.power(1, "1/3")])
        first = verdict_theorem1(paramagnet, 0.1, 0.25, config)
        second = verdict_theorem1(paramagnet, 0.25, 0.4, config)
        for verdict in (first, second):
            assert verdict.decision == "possible"
            assert verdict.branch == "strict-gap"
        middle = first.estimates["target"].value
        assert middle == second.estimates["source"].value
        assert first.estimates["source"].value < middle < second.estimates["target"].value

        direct = verdict_theorem1(paramagnet, 0.1, 0.4, config)
        assert direct.decision == "possible"
        assert direct.branch == "strict-gap"


SCENARIOS = Path(__file__).parent.parent / "scenarios"


class TestFiniteScaleWitness:
    @pytest.fixture
    def small_config(self):
        return VerdictConfig.with_defaults([8], [DeltaSchedule.constant("1/2")])

    def test_convertible_scale_carries_witness(self, paramagnet, small_config):
        verdict = verdict_finite_scale(paramagnet, 0.2, 0.4, small_config)
        assert verdict.decision == "possible"
        assert verdict.schedule_family == ["constant-1_2", "constant-1_2"]
        row = verdict.scale_evidence[0]
        assert (row.dimension, row.dimension_prime) == (36, 154)
        assert 1 <= row.witness_steps <= 153

    def test_no_witness_when_not_convertible(self, paramagnet, small_config):
        verdict = verdict_finite_scale(paramagnet, 0.4, 0.2, small_config)
        assert verdict.decision == "impossible"
        assert verdict.scale_evidence[0].witness_steps is None

    def test_no_witness_above_chain_cap(self, paramagnet, demo_config):
        verdict = verdict_finite_scale(paramagnet, 0.2, 0.4, demo_config)
        assert all(row.witness_steps is None for row in verdict.scale_evidence)

    def test_configured_tolerances_reach_the_chain(self, paramagnet, monkeypatch):
        seen = []

        def recording_chain(p, q, **kwargs):
            seen.append(kwargs)
            return t_transform_chain(p, q, **kwargs)

        monkeypatch.setattr("accessibility.verdicts.t_transform_chain", recording_chain)
        config = VerdictConfig.with_defaults(
            [8], [DeltaSchedule.constant("1/2")],
            map_tolerance=1e-10, witness_tolerance=1e-7, normalization_tolerance=1e-11,
        )
        verdict_finite_scale(paramagnet, 0.2, 0.4, config)
        assert seen == [{
            "cap": config.chain_cap,
            "witness_tolerance": 1e-7,
            "map_tolerance": 1e-10,
            "normalization_tolerance": 1e-11,
        }]

    def test_scenario_tolerances_carried(self, tmp_path):
        text = (SCENARIOS / "paramagnet-demo.yaml").read_text()
        path = tmp_path / "loose.yaml"
        path.write_text(text.replace("witness: 1.0e-9", "witness: 1.0e-7").replace("map: 1.0e-12", "map: 1.0e-10"))
        config = VerdictConfig.from_scenario(load_scenario(str(path)))
        assert config.witness_tolerance == 1e-7
        assert config.map_tolerance == 1e-10
        assert config.normalization_tolerance == 1e-12
