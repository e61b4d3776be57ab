import math
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple, Union

from config.defaults import get_defaults
from models.errors import ArityMismatchError, SpectrumCapExceeded, ValidationFailure
from models.system import Eigenvalues, JointSpectrum, ModelSystem

Table = Dict[Eigenvalues, int]


def binom_row(n: int) -> List[int]:
    """[C(n,0), ..., C(n,n)] computed iteratively in exact integers"""
    row = [1]
    for k in range(1, n + 1):
        row.append(row[-1] * (n - k + 1) // k)
    return row


def _add_scaled(partial: Eigenvalues, count: int, vector: Eigenvalues) -> Eigenvalues:
    if count == 0:
        return partial
    return tuple(p + count * v for p, v in zip(partial, vector))


def _composition_terms(model: ModelSystem, sites: int) -> Iterator[Tuple[Eigenvalues, int]]:
    """One term per composition (n_1, ..., n_r) of the sites over the site alternatives.

    The tuple is sum_j n_j v_j and the count multinomial(n; n_j) * prod_j m_j^n_j.
    Different compositions may share a tuple; callers aggregate if they need to.
    """
    vectors = model.site_table
    weights = model.multiplicities
    last = len(vectors) - 1
    rows: Dict[int, List[int]] = {}

    def walk(index: int, remaining: int, partial: Eigenvalues, coefficient: int):
        if index == last:
            yield _add_scaled(partial, remaining, vectors[last]), coefficient * weights[last] ** remaining
            return
        if remaining not in rows:
            rows[remaining] = binom_row(remaining)
        row = rows[remaining]
        power = 1
        for count in range(remaining + 1):
            yield from walk(
                index + 1,
                remaining - count,
                _add_scaled(partial, count, vectors[index]),
                coefficient * row[count] * power,
            )
            power *= weights[index]

    yield from walk(0, sites, tuple(0 for _ in range(model.num_observables)), 1)


def _convolve_tables(left: Table, right: Table) -> Table:
    result: Table = {}
    for lv, lm in left.items():
        for rv, rm in right.items():
            key = tuple(a + b for a, b in zip(lv, rv))
            result[key] = result.get(key, 0) + lm * rm
    return result


def _power_table(site: Table, sites: int) -> Table:
    """n-fold self-convolution by repeated squaring"""
    result: Table = {tuple(0 for _ in next(iter(site))): 1}
    base = site
    while sites:
        if sites & 1:
            result = _convolve_tables(result, base)
        sites >>= 1
        if sites:
            base = _convolve_tables(base, base)
    return result


def _box_count(model: ModelSystem, sites: int) -> int:
    count = 1
    for l in range(model.num_observables):
        values = [row[l] for row in model.site_table]
        count *= sites * (max(values) - min(values)) + 1
    return count


def _composition_count(model: ModelSystem, sites: int) -> int:
    r = len(model.site_table)
    return math.comb(sites + r - 1, r - 1)


def predicted_tuple_count(model: ModelSystem, scale: int) -> int:
    """Upper bound on the number of distinct joint eigenvalue tuples at scale X"""
    sites = model.sites_at(scale)
    return min(_composition_count(model, sites), _box_count(model, sites))


def _use_compositions(model: ModelSystem, sites: int) -> bool:
    half = _box_count(model, max(1, sites // 2))
    return _composition_count(model, sites) <= 2 * half * half


def _check_scale(scale: int):
    if isinstance(scale, bool) or not isinstance(scale, int) or scale < 1:
        raise ValidationFailure(f"scale must be a positive integer, got {scale!r}")


def joint_spectrum(model: ModelSystem, scale: int, cap: Optional[int] = None) -> JointSpectrum:
    """Exact joint multiplicity table of the observables at scale X.

    Models with few site alternatives are counted by compositions (multinomial
    coefficients); models with many alternatives but a narrow value range go
    through repeated squaring of the per-site table. Both give the n-fold
    convolution of the site table exactly.
    """
    _check_scale(scale)
    if cap is None:
        cap = get_defaults()["spectrum_cap"]
    predicted = predicted_tuple_count(model, scale)
    if predicted > cap:
        raise SpectrumCapExceeded(predicted, cap, scale)

    sites = model.sites_at(scale)
    if _use_compositions(model, sites):
        table: Table = {}
        for values, count in _composition_terms(model, sites):
            table[values] = table.get(values, 0) + count
    else:
        site = dict(zip(model.site_table, model.multiplicities))
        table = _power_table(site, sites)

    return JointSpectrum(
        scale=scale,
        num_observables=model.num_observables,
        entries=tuple(sorted(table.items())),
        total_dimension=model.total_dimension(scale),
        value_unit=model.value_unit,
    )


@lru_cache(maxsize=16)
def cached_joint_spectrum(model: ModelSystem, scale: int, cap: Optional[int] = None) -> JointSpectrum:
    return joint_spectrum(model, scale, cap)


def convolve_spectra(left: JointSpectrum, right: JointSpectrum) -> JointSpectrum:
    """Spectrum of two independent site groups taken together"""
    if left.num_observables != right.num_observables:
        raise ArityMismatchError(
            f"cannot convolve spectra with {left.num_observables} and {right.num_observables} observables"
        )
    if tuple(left.value_unit) != tuple(right.value_unit):
        raise ValidationFailure("cannot convolve spectra with different value units")
    table = _convolve_tables(left.as_dict(), right.as_dict())
    return JointSpectrum(
        scale=left.scale + right.scale,
        num_observables=left.num_observables,
        entries=tuple(sorted(table.items())),
        total_dimension=left.total_dimension * right.total_dimension,
        value_unit=left.value_unit,
    )


class StreamedSpectrum:
    """Spectrum view that regenerates composition terms on every pass instead of storing them.

    Counting operations accept it wherever they accept a JointSpectrum. Terms
    are not aggregated, so a tuple may appear more than once.
    """

    def __init__(self, model: ModelSystem, scale: int):
        _check_scale(scale)
        self.model = model
        self.scale = scale
        self.num_observables = model.num_observables
        self.value_unit = model.value_unit
        self.total_dimension = model.total_dimension(scale)

    def iter_entries(self) -> Iterator[Tuple[Eigenvalues, int]]:
        return _composition_terms(self.model, self.model.sites_at(self.scale))

    def distinct_values(self, observable: int) -> List[int]:
        return sorted({values[observable] for values, _ in self.iter_entries()})


SpectrumLike = Union[JointSpectrum, StreamedSpectrum]


def stream_spectrum(model: ModelSystem, scale: int) -> StreamedSpectrum:
    return StreamedSpectrum(model, scale)


def spectrum_for(model: ModelSystem, scale: int, cap: Optional[int] = None) -> SpectrumLike:
    """Cached table when it fits under the cap, streamed view otherwise"""
    try:
        return cached_joint_spectrum(model, scale, cap)
    except SpectrumCapExceeded:
        return stream_spectrum(model, scale)
