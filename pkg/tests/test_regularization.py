import math
from fractions import Fraction

import pytest

from config.defaults import get_defaults
from microcanonical.counting import downward_dimension
from microcanonical.states import boltzmann_entropy
from models.errors import EmptyShellError, GapConditionError, InsufficientPointsError, ValidationFailure
from models.schedule import DeltaSchedule, EntropyPoint, EntropySequence, LimitEstimate
from models.macrostate import Macrostate, ShellConvention
from regularization.bounds import (
    delta0_schedule,
    geometric_scales,
    schedule_trend,
    strict_increase_screen,
    tail_proxies,
    upper_lower_entropy,
)
from regularization.extrapolation import affine_fit, estimate_limit, richardson_table, schedule_fit
from regularization.sequence import DOWNWARD, entropy_density_sequence, gamma_residuals, residual_decay, residual_f
from spectra.convolution import spectrum_for

SCALES = [256, 512, 1024, 2048, 4096]
DENSE_SCALES = [256, 384, 512, 768, 1024, 1536, 2048, 3072, 4096]


def constant_sequence(value, scales):
    return EntropySequence(
        macrostate=Macrostate.coerce(0.5),
        schedule_id="downward",
        tag="downward",
        points=tuple(EntropyPoint(scale=x, dimension=1, density=value) for x in scales),
    )


def sequence_from_counts(a, schedule_id, counts):
    """Downward-tagged sequence from (X, D) pairs"""
    return EntropySequence(
        macrostate=Macrostate.coerce(a),
        schedule_id=schedule_id,
        tag="downward",
        points=tuple(EntropyPoint(scale=x, dimension=d, density=boltzmann_entropy(d) / x) for x, d in counts),
    )


def agree_within_margins(first, second):
    return abs(first.value - second.value) <= first.error_bar + second.error_bar + get_defaults()["margin_floor"]


class TestSchedules:
    def test_power_needs_positive_exponent(self):
        with pytest.raises(ValueError):
            DeltaSchedule.power(1, 0)

    def test_power_values(self):
        schedule = DeltaSchedule.power(1, "1/3")
        assert float(schedule.delta_at(4096)) == pytest.approx(1 / 16)
        assert schedule.id == "power-c1-a1_3"

    def test_constant(self):
        schedule = DeltaSchedule.constant(0.1)
        assert schedule.delta_at(10) == Fraction(1, 10)
        assert schedule.id == "constant-1_10"

    def test_table_steps(self):
        schedule = DeltaSchedule.from_table([(10, 0.3), (100, 0.2), (1000, 0.1)])
        assert schedule.delta_at(5) == Fraction(3, 10)
        assert schedule.delta_at(150) == Fraction(1, 5)
        assert schedule.delta_at(5000) == Fraction(1, 10)

    def test_table_must_decrease_when_required(self):
        with pytest.raises(ValueError):
            DeltaSchedule.from_table([(1, 0.1), (10, 0.2)], require_decreasing=True)

    def test_plateau_then_decay(self):
        schedule = DeltaSchedule(form="constant-then-decay", plateau=0.1, switch_scale=100, exponent="1/2")
        assert schedule.delta_at(50) == Fraction(1, 10)
        assert schedule.delta_at(400) == Fraction(1, 20)

    def test_trend_of_table(self):
        schedule = DeltaSchedule.from_table([(10, 0.4), (20, 0.2), (40, 0.1)])
        assert schedule_trend(schedule) == pytest.approx(-1.0)
        assert schedule_trend(DeltaSchedule.power(1, 1)) is None

    def test_default_grid(self):
        assert geometric_scales() == SCALES


class TestSequence:
    def test_downward_x4(self, paramagnet):
        seq = entropy_density_sequence(paramagnet, 0.25, DOWNWARD, [4])
        assert seq.points[0].dimension == 5
        assert seq.densities[0] == pytest.approx(math.log(5) / 4)

    def test_single_scale_only_last_point(self, paramagnet):
        seq = entropy_density_sequence(paramagnet, 0.25, DOWNWARD, [4])
        assert estimate_limit(seq, "last-point").value == seq.densities[0]
        with pytest.raises(InsufficientPointsError):
            estimate_limit(seq, "affine-fit")

    def test_empty_shell_dropped(self, paramagnet):
        seq = entropy_density_sequence(paramagnet, 0.3, DeltaSchedule.constant(0.01), [4, 100])
        assert seq.dropped_scales == (4,)
        assert seq.scales == [100]

    def test_all_shells_empty(self, paramagnet):
        with pytest.raises(EmptyShellError):
            entropy_density_sequence(paramagnet, 0.3, DeltaSchedule.constant(0.01), [4])

    def test_scales_must_increase(self, paramagnet):
        with pytest.raises(ValidationFailure):
            entropy_density_sequence(paramagnet, 0.25, DOWNWARD, [512, 256])

    def test_unknown_tag(self, paramagnet):
        with pytest.raises(ValidationFailure):
            entropy_density_sequence(paramagnet, 0.25, "upward", [4])

    def test_wider_shells_never_smaller(self, paramagnet):
        narrow = entropy_density_sequence(paramagnet, 0.3, DeltaSchedule.power("1/2", "1/3"), SCALES)
        wide = entropy_density_sequence(paramagnet, 0.3, DeltaSchedule.power(1, "1/3"), SCALES)
        for s_narrow, s_wide in zip(narrow.densities, wide.densities):
            assert s_narrow <= s_wide


class TestExtrapolation:
    def test_affine_fit_downward(self, paramagnet, h):
        seq = entropy_density_sequence(paramagnet, 0.25, DOWNWARD, SCALES)
        estimate = estimate_limit(seq, "affine-fit")
        assert estimate.value == pytest.approx(h(0.25), abs=5e-3)
        assert estimate.error_bar >= 0
        assert estimate.tail_window == tuple(SCALES)

    def test_constant_sequence(self):
        seq = constant_sequence(0.4, SCALES)
        for method in ("last-point", "richardson", "affine-fit", "schedule-fit"):
            estimate = estimate_limit(seq, method)
            assert estimate.value == pytest.approx(0.4, abs=1e-12)
            assert estimate.error_bar == pytest.approx(0.0, abs=1e-12)

    def test_richardson_two_points(self):
        table = richardson_table([100, 200], [0.5, 0.6])
        assert table[-1][0] == pytest.approx(2 * 0.6 - 0.5)

    def test_richardson_removes_one_over_x(self):
        scales = [64, 128, 256, 512]
        values = [1.0 + 3.0 / x + 5.0 / x ** 2 for x in scales]
        assert richardson_table(scales, values)[-1][0] == pytest.approx(1.0, abs=1e-12)

    def test_affine_fit_exact_model(self):
        scales = [100, 200, 400, 800, 1600]
        values = [0.7 - 0.5 * math.log(x) / x + 2.0 / x for x in scales]
        fit = affine_fit(scales, values)
        assert fit.value == pytest.approx(0.7, abs=1e-10)

    def test_schedule_fit_keeps_one_column_short(self):
        scales = [256, 512, 1024, 2048, 4096]
        deltas = [x ** -0.5 for x in scales]
        values = [0.6 + 0.2 * d for d in deltas]
        fit = schedule_fit(scales, values, deltas)
        assert "delta^2" in fit.columns
        assert "1/X" not in fit.columns
        assert fit.value == pytest.approx(0.6, abs=1e-8)

    def test_unknown_method(self):
        with pytest.raises(ValidationFailure):
            estimate_limit(constant_sequence(0.4, SCALES), "spline")


class TestUpperLower:
    def test_paramagnet_quarter_filling(self, paramagnet, h):
        family = [DeltaSchedule.power(1, "1/4"), DeltaSchedule.power(1, "1/2"), DeltaSchedule.power(0.1, "1/3")]
        upper, lower = upper_lower_entropy(paramagnet, 0.25, family, DENSE_SCALES)
        assert lower.value <= upper.value
        assert upper.value == pytest.approx(h(0.25), abs=1e-2)
        assert lower.value == pytest.approx(h(0.25), abs=1e-2)

    def test_monotone_tail_single_point(self, paramagnet):
        seq = entropy_density_sequence(paramagnet, 0.25, DOWNWARD, SCALES)
        upper, lower = tail_proxies(seq, 0.2, extrapolate=False)
        assert upper.value == lower.value == seq.densities[-1]
        upper, lower = tail_proxies(seq, 0.5, extrapolate=False)
        assert upper.value == seq.densities[-1]
        assert lower.value <= upper.value

    def test_lower_never_above_upper(self, paramagnet, lattice_gas):
        family = [DeltaSchedule.power(1, "1/4"), DeltaSchedule.power("1/2", "1/3")]
        for model, a in ((paramagnet, 0.1), (paramagnet, 0.4), (lattice_gas, (0.4, 0.3))):
            upper, lower = upper_lower_entropy(model, a, family, [64, 128, 256])
            assert lower.value <= upper.value

    def test_empty_family(self, paramagnet):
        with pytest.raises(ValidationFailure):
            upper_lower_entropy(paramagnet, 0.25, [], SCALES)

    def test_gamma_residuals(self, paramagnet):
        seq = entropy_density_sequence(paramagnet, 0.25, DOWNWARD, SCALES)
        upper, lower = tail_proxies(seq, 1.0, extrapolate=False)
        gammas = gamma_residuals(seq, upper, lower)
        assert gammas["gamma_upper"] == [0.0] * len(SCALES)
        assert gammas["gamma_lower"] == [0.0] * len(SCALES)


class TestResidual:
    def test_residual_shrinks(self, paramagnet, h):
        reference = LimitEstimate(value=h(0.25), error_bar=0.0, method="last-point", tail_window=(4096,))
        schedule = DeltaSchedule.power(1, "1/3")
        values = [residual_f(paramagnet, 0.25, schedule, x, reference) for x in SCALES]
        assert abs(values[-1]) < abs(values[0])
        assert abs(values[-1]) < 2e-2

    def test_decay_check(self):
        assert residual_decay([0.03, -0.02, 0.01])
        assert not residual_decay([0.01, 0.02])

    def test_zero_at_reference(self, paramagnet):
        schedule = DeltaSchedule.power(1, "1/3")
        seq = entropy_density_sequence(paramagnet, 0.25, schedule, [512])
        reference = LimitEstimate(value=seq.densities[0], error_bar=0.0, method="last-point", tail_window=(512,))
        assert residual_f(paramagnet, 0.25, schedule, 512, reference) == 0.0


class TestDelta0:
    def test_three_steps(self, paramagnet):
        construction = delta0_schedule(paramagnet, 0.25, [0.2, 0.1, 0.05], SCALES)
        table = construction.schedule.table
        assert [eps for _, eps in table] == [Fraction(1, 5), Fraction(1, 10), Fraction(1, 20)]
        starts = [x for x, _ in table]
        assert starts == sorted(set(starts))
        assert construction.verified
        for step in construction.steps:
            assert step.gap <= -1 / math.sqrt(step.scale)

    def test_single_epsilon(self, paramagnet):
        construction = delta0_schedule(paramagnet, 0.25, [0.2], SCALES)
        assert len(construction.schedule.table) == 1

    def test_saturated_macrostate_fails(self, paramagnet):
        with pytest.raises(GapConditionError):
            delta0_schedule(paramagnet, 0.9, [0.2], [256, 512])

    def test_epsilons_must_decrease(self, paramagnet):
        with pytest.raises(ValidationFailure):
            delta0_schedule(paramagnet, 0.25, [0.1, 0.2], SCALES)

    def test_steps_sit_on_tested_scales(self, paramagnet):
        # both epsilons pass from X = 256 on, so the second step moves to the next tested scale
        construction = delta0_schedule(paramagnet, 0.25, [0.2, 0.19], SCALES)
        assert [x for x, _ in construction.schedule.table] == [256, 512]
        assert construction.verified

    def test_no_tested_scale_left_for_a_step(self, paramagnet):
        with pytest.raises(GapConditionError):
            delta0_schedule(paramagnet, 0.25, [0.2, 0.19, 0.18], [256, 512])


class TestShiftedThresholds:
    def test_shifted_downward_limit_matches(self, paramagnet):
        # delta_X = 4/X moves the threshold X/4 up by exactly one level
        schedule = DeltaSchedule.power(4, 1)
        a = Macrostate.coerce(0.25)
        base = entropy_density_sequence(paramagnet, a, DOWNWARD, SCALES)
        shifted = sequence_from_counts(a, schedule.id, [
            (x, downward_dimension(spectrum_for(paramagnet, x), a.scaled(1 + schedule.delta_at(x)), x))
            for x in SCALES
        ])
        for point, moved in zip(base.points, shifted.points):
            assert moved.dimension > point.dimension
        assert agree_within_margins(estimate_limit(base, "affine-fit"), estimate_limit(shifted, "affine-fit"))

    def test_shell_above_delta0_tracks_upper_edge(self, paramagnet):
        a = Macrostate.coerce(0.25)
        floor = delta0_schedule(paramagnet, a, [0.2, 0.1], SCALES).schedule
        schedule = DeltaSchedule.power(1, "1/4")
        for x in SCALES:
            assert schedule.delta_at(x) > floor.delta_at(x)

        shell = entropy_density_sequence(paramagnet, a, schedule, SCALES)
        convention = ShellConvention()
        tops = []
        for point in shell.points:
            spectrum = spectrum_for(paramagnet, point.scale)
            lo, hi = convention.window(a.densities[0], point.delta, point.scale)
            top = spectrum.count_at_most(math.ceil(hi) - 1)
            below = spectrum.count_at_most(math.ceil(lo) - 1)
            assert point.dimension == top - below
            # the gap condition leaves at most exp(-sqrt(X)) of the top count below the shell
            assert math.log(below) + math.sqrt(point.scale) <= math.log(top)
            slack = -math.log1p(-math.exp(-math.sqrt(point.scale))) / point.scale
            assert -1e-12 <= boltzmann_entropy(top) / point.scale - point.density <= slack + 1e-12
            tops.append((point.scale, top))

        upper_edge = sequence_from_counts(a, schedule.id, tops)
        assert agree_within_margins(estimate_limit(shell, "affine-fit"), estimate_limit(upper_edge, "affine-fit"))


class TestScreen:
    def test_increasing_below_half(self, paramagnet):
        screen = strict_increase_screen(paramagnet, 0.25, SCALES)
        assert screen.passed
        assert 0 < screen.slopes[0] < 2 * math.log(3)

    def test_flat_above_saturation(self, paramagnet):
        assert not strict_increase_screen(paramagnet, 0.9, [256, 512, 1024]).passed

    def test_lattice_gas_both_constraints_bind(self, lattice_gas):
        screen = strict_increase_screen(lattice_gas, (0.4, 0.3), [64, 128, 256, 512])
        assert screen.passed
        assert len(screen.slopes) == 2
