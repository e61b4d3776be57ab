from math import comb

import pytest

from microcanonical.counting import downward_dimension
from models.errors import ArityMismatchError, EmptySiteTableError, SpectrumCapExceeded, UnknownFamilyError, \
    ValidationFailure
from spectra.convolution import (
    StreamedSpectrum,
    _composition_terms,
    _power_table,
    convolve_spectra,
    joint_spectrum,
    predicted_tuple_count,
    spectrum_for,
)
from spectra.families import build_model


class TestBuildModel:
    def test_paramagnet(self, paramagnet):
        assert paramagnet.site_table == ((0,), (1,))
        assert paramagnet.num_observables == 1

    def test_lattice_gas_default(self, lattice_gas):
        assert lattice_gas.site_table == ((0, 0), (1, 1), (2, 1))
        assert lattice_gas.num_observables == 2

    def test_lattice_gas_parameter(self):
        model = build_model({"family": "lattice-gas", "parameters": {"e2": 3}})
        assert (3, 1) in model.site_table

    def test_oscillator_chain(self):
        model = build_model({"family": "oscillator-chain", "parameters": {"q_max": 2}})
        assert model.site_table == ((0,), (1,), (2,))

    def test_unknown_family_names_it(self):
        with pytest.raises(UnknownFamilyError, match="ising-glass"):
            build_model("ising-glass")

    def test_unknown_parameter(self):
        with pytest.raises(ValidationFailure, match="e3"):
            build_model({"family": "lattice-gas", "parameters": {"e3": 1}})

    def test_empty_site_table(self):
        with pytest.raises(EmptySiteTableError, match="empty site table"):
            build_model({"site_table": []})

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatchError):
            build_model({"site_table": [[0], [1, 2]]})

    def test_single_distinct_tuple_rejected(self):
        with pytest.raises(ValidationFailure):
            build_model({"site_table": [[1], [1]]})

    def test_duplicates_merge_into_multiplicity(self):
        model = build_model({"site_table": [[0], [1], [1]]})
        assert model.site_table == ((0,), (1,))
        assert model.multiplicities == (1, 2)
        assert model.total_dimension(3) == 27

    def test_sites_scale_by_integer_multiple(self):
        model = build_model({"site_table": [[0], [1]], "sites_per_scale": 2})
        assert [model.sites_at(scale) for scale in (1, 2, 3)] == [2, 4, 6]
        spectrum = joint_spectrum(model, 3)
        assert spectrum.total_dimension == 64
        assert spectrum.as_dict()[(3,)] == comb(6, 3)


class TestJointSpectrum:
    def test_paramagnet_x4(self, paramagnet):
        spectrum = joint_spectrum(paramagnet, 4)
        assert spectrum.as_dict() == {(0,): 1, (1,): 4, (2,): 6, (3,): 4, (4,): 1}
        assert spectrum.total_dimension == 16

    def test_single_site_is_site_table(self, lattice_gas):
        spectrum = joint_spectrum(lattice_gas, 1)
        assert spectrum.as_dict() == {(0, 0): 1, (1, 1): 1, (2, 1): 1}

    def test_raw_two_tuple_table(self):
        model = build_model({"site_table": [[0, 0], [1, 1]]})
        spectrum = joint_spectrum(model, 2)
        assert spectrum.as_dict() == {(0, 0): 1, (1, 1): 2, (2, 2): 1}
        assert spectrum.total_dimension == 4

    def test_lattice_gas_x2(self, lattice_gas):
        spectrum = joint_spectrum(lattice_gas, 2)
        assert spectrum.as_dict() == {(0, 0): 1, (1, 1): 2, (2, 1): 2, (2, 2): 1, (3, 2): 2, (4, 2): 1}
        assert spectrum.total_dimension == 9

    @pytest.mark.parametrize("scale", [1, 7, 33, 64])
    def test_paramagnet_binomial(self, paramagnet, scale):
        spectrum = joint_spectrum(paramagnet, scale)
        assert spectrum.as_dict() == {(k,): comb(scale, k) for k in range(scale + 1)}

    def test_entries_sorted_and_sum(self, lattice_gas):
        spectrum = joint_spectrum(lattice_gas, 12)
        tuples = [values for values, _ in spectrum.entries]
        assert tuples == sorted(set(tuples))
        assert sum(m for _, m in spectrum.entries) == 3 ** 12

    def test_multiplicities_weight_total(self):
        model = build_model({"site_table": [[0], [1]], "multiplicities": [1, 3]})
        spectrum = joint_spectrum(model, 5)
        assert spectrum.total_dimension == 4 ** 5
        assert spectrum.as_dict()[(5,)] == 3 ** 5

    def test_split_convolution_matches_direct(self, lattice_gas):
        left = joint_spectrum(lattice_gas, 4)
        right = joint_spectrum(lattice_gas, 7)
        combined = convolve_spectra(left, right)
        direct = joint_spectrum(lattice_gas, 11)
        assert combined.entries == direct.entries
        assert combined.total_dimension == direct.total_dimension

    def test_composition_and_squaring_agree(self, lattice_gas):
        site = dict(zip(lattice_gas.site_table, lattice_gas.multiplicities))
        squared = _power_table(site, 9)
        composed = {}
        for values, count in _composition_terms(lattice_gas, 9):
            composed[values] = composed.get(values, 0) + count
        assert squared == composed

    def test_scale_must_be_positive(self, paramagnet):
        with pytest.raises(ValidationFailure):
            joint_spectrum(paramagnet, 0)


class TestCap:
    def test_cap_exceeded(self, paramagnet):
        assert predicted_tuple_count(paramagnet, 100) == 101
        with pytest.raises(SpectrumCapExceeded):
            joint_spectrum(paramagnet, 100, cap=10)

    def test_streamed_fallback_counts_the_same(self, lattice_gas):
        streamed = spectrum_for(lattice_gas, 20, cap=5)
        assert isinstance(streamed, StreamedSpectrum)
        table = joint_spectrum(lattice_gas, 20)
        a = (0.4, 0.3)
        assert downward_dimension(streamed, a, 20) == downward_dimension(table, a, 20)
        assert streamed.distinct_values(1) == table.distinct_values(1)
