import math
from fractions import Fraction

import pytest

from microcanonical.counting import boundary_hits, count_report, downward_dimension, shell_dimension
from microcanonical.states import boltzmann_entropy, microcanonical_state
from models.errors import ArityMismatchError, EmptyShellError, ScaleMismatchError, ValidationFailure
from models.macrostate import FlatState, Macrostate, ShellConvention
from spectra.convolution import joint_spectrum


@pytest.fixture(scope="module")
def x4(paramagnet):
    return joint_spectrum(paramagnet, 4)


class TestMacrostate:
    def test_floats_become_exact(self):
        state = Macrostate(densities=(0.3,))
        assert state.densities == (Fraction(3, 10),)

    def test_scalar_accepted(self):
        assert Macrostate.coerce(0.25).densities == (Fraction(1, 4),)

    def test_scaled(self):
        assert Macrostate.coerce(0.3).scaled(Fraction(11, 10)).densities == (Fraction(33, 100),)

    def test_describe_uses_label(self):
        assert Macrostate(densities=(0.2,), label="cold").describe() == "cold"
        assert Macrostate.coerce(0.2).describe() == "(0.2)"


class TestDownward:
    def test_half_filling(self, x4):
        assert downward_dimension(x4, 0.5, 4) == 11

    def test_below_every_eigenvalue(self, x4):
        assert downward_dimension(x4, -0.1, 4) == 0

    def test_saturated(self, x4):
        assert downward_dimension(x4, 1.0, 4) == 16

    def test_scale_mismatch(self, x4):
        with pytest.raises(ScaleMismatchError):
            downward_dimension(x4, 0.5, 5)

    def test_arity_mismatch(self, x4):
        with pytest.raises(ArityMismatchError):
            downward_dimension(x4, (0.5, 0.5), 4)

    def test_monotone_under_bumps(self, lattice_gas, rng):
        spectrum = joint_spectrum(lattice_gas, 24)
        for _ in range(50):
            a = tuple(round(float(v), 3) for v in rng.uniform(0.0, 1.5, size=2))
            component = int(rng.integers(0, 2))
            bumped = list(a)
            bumped[component] += 0.05
            assert downward_dimension(spectrum, a, 24) <= downward_dimension(spectrum, tuple(bumped), 24)

    def test_lattice_gas_box(self, lattice_gas):
        spectrum = joint_spectrum(lattice_gas, 2)
        # energy <= 2 and particles <= 1: (0,0), two of (1,1), two of (2,1)
        assert downward_dimension(spectrum, (1, 0.5), 2) == 5


class TestShell:
    def test_multiplicative_window(self, x4):
        assert shell_dimension(x4, 0.5, 0.25, 4) == 6

    def test_additive_window(self, x4):
        # [4 (0.5 - 0.25), 4 (0.5 + 0.25)) = [1, 3)
        assert shell_dimension(x4, 0.5, 0.25, 4, ShellConvention(mode="additive")) == 4 + 6

    def test_saturated_window(self, x4):
        assert shell_dimension(x4, 0.5, 5, 4, ShellConvention.model_validate("add")) == 16

    def test_empty_window(self, x4):
        assert shell_dimension(x4, 0.3, 0.01, 4) == 0

    def test_nonpositive_delta(self, x4):
        with pytest.raises(ValidationFailure):
            shell_dimension(x4, 0.5, 0, 4)

    def test_monotone_in_delta(self, paramagnet):
        spectrum = joint_spectrum(paramagnet, 60)
        counts = [shell_dimension(spectrum, 0.3, delta, 60) for delta in (0.01, 0.05, 0.1, 0.2, 0.4)]
        assert counts == sorted(counts)

    def test_difference_identity_single_observable(self, paramagnet, rng):
        checked = 0
        for _ in range(200):
            scale = int(rng.integers(8, 200))
            a = round(float(rng.uniform(0.05, 0.95)), 4)
            delta = round(float(rng.uniform(0.01, 0.5)), 4)
            report = count_report(joint_spectrum(paramagnet, scale), a, delta, scale)
            if report.boundary_hits:
                continue
            checked += 1
            assert report.shell == report.corner_difference
        assert checked > 100

    def test_boundary_hit_flagged(self, x4):
        # upper corner 4 * 0.6 * 1.25 = 3 is an eigenvalue, lower corner 1.8 is not
        hits = boundary_hits(x4, 0.6, 4, 0.25)
        assert hits == [(0, "upper", 3)]
        report = count_report(x4, 0.6, 0.25, 4)
        assert report.shell == 6
        assert not report.agrees
        assert report.corner_difference - report.shell == 4

    def test_box_counted_directly(self, lattice_gas):
        spectrum = joint_spectrum(lattice_gas, 30)
        report = count_report(spectrum, (0.4, 0.3), 0.2, 30)
        assert report.shell == shell_dimension(spectrum, (0.4, 0.3), 0.2, 30)


class TestStates:
    def test_entropy_values(self):
        assert boltzmann_entropy(1) == 0.0
        assert boltzmann_entropy(11) == pytest.approx(2.3979, abs=1e-4)

    def test_entropy_of_empty_shell(self):
        with pytest.raises(EmptyShellError, match="empty shell"):
            boltzmann_entropy(0)

    def test_entropy_of_huge_count(self):
        assert boltzmann_entropy(2 ** 5000) == pytest.approx(5000 * math.log(2))

    def test_flat_state(self, x4):
        state = microcanonical_state(x4, 0.5, 0.25, 4)
        assert state.dimension == 6
        assert state.ambient_dimension == 16
        assert state.support.delta == Fraction(1, 4)
        assert state.probabilities().sum() == pytest.approx(1.0)

    def test_full_window_is_maximally_mixed(self, x4):
        state = microcanonical_state(x4, 0.5, 5, 4, ShellConvention(mode="additive"))
        assert state.dimension == state.ambient_dimension == 16

    def test_empty_shell_state(self, x4):
        with pytest.raises(EmptyShellError):
            microcanonical_state(x4, 0.3, 0.01, 4)

    def test_flat_state_too_large(self):
        with pytest.raises(ValueError):
            FlatState(dimension=5, ambient_dimension=4)
