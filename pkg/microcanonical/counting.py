import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from models.errors import ArityMismatchError, ScaleMismatchError, ValidationFailure
from models.macrostate import Macrostate, ShellConvention
from models.rational import to_fraction
from models.system import JointSpectrum
from spectra.convolution import SpectrumLike

# (observable, edge, eigenvalue) where a threshold lands exactly on an eigenvalue
BoundaryHit = Tuple[int, str, int]


class CountReport(BaseModel):
    """Direct box count of a shell next to the corner difference D(hi corner) - D(lo corner)"""

    model_config = ConfigDict(frozen=True)

    scale: int
    shell: int
    upper_downward: int
    lower_downward: int
    corner_difference: int
    boundary_hits: List[BoundaryHit]
    agrees: bool


def _check(spectrum: SpectrumLike, a: Macrostate, scale: int):
    if spectrum.scale != scale:
        raise ScaleMismatchError(scale, spectrum.scale)
    if a.num_observables != spectrum.num_observables:
        raise ArityMismatchError(
            f"macrostate {a.describe()} has {a.num_observables} densities, "
            f"model has {spectrum.num_observables} observables"
        )


def _positive_delta(delta) -> Fraction:
    delta = to_fraction(delta)
    if delta <= 0:
        raise ValidationFailure(f"shell half-width must be positive, got {delta}")
    return delta


def _count_box(spectrum: SpectrumLike, lows: Sequence[Optional[int]], highs: Sequence[int]) -> int:
    """Multiplicity of tuples with lows[l] <= lambda_l <= highs[l]; a None low is unbounded"""
    if isinstance(spectrum, JointSpectrum) and spectrum.num_observables == 1:
        high = highs[0]
        low = lows[0]
        below = 0 if low is None else spectrum.count_at_most(low - 1)
        return max(0, spectrum.count_at_most(high) - below)

    total = 0
    for values, multiplicity in spectrum.iter_entries():
        for value, low, high in zip(values, lows, highs):
            if value > high or (low is not None and value < low):
                break
        else:
            total += multiplicity
    return total


def downward_bounds(spectrum: SpectrumLike, thresholds: Sequence[Fraction]) -> List[int]:
    """lambda * unit <= t  <=>  lambda <= floor(t / unit)"""
    return [math.floor(t / unit) for t, unit in zip(thresholds, spectrum.value_unit)]


def count_at_thresholds(spectrum: SpectrumLike, thresholds: Sequence[Fraction]) -> int:
    bounds = downward_bounds(spectrum, thresholds)
    return _count_box(spectrum, [None] * len(bounds), bounds)


def downward_dimension(spectrum: SpectrumLike, a, scale: int) -> int:
    """D(a): multiplicity of joint eigenvalues with lambda_l <= X a_l for every observable"""
    a = Macrostate.coerce(a)
    _check(spectrum, a, scale)
    return count_at_thresholds(spectrum, [scale * density for density in a.densities])


def shell_windows(
    a: Macrostate, delta: Fraction, scale: int, convention: ShellConvention
) -> List[Tuple[Fraction, Fraction]]:
    return [convention.window(density, delta, scale) for density in a.densities]


def shell_dimension(
    spectrum: SpectrumLike, a, delta, scale: int, convention: Optional[ShellConvention] = None
) -> int:
    """D_{a,delta}: multiplicity of joint eigenvalues inside the half-open box around X a"""
    a = Macrostate.coerce(a)
    _check(spectrum, a, scale)
    delta = _positive_delta(delta)
    convention = convention or ShellConvention()
    lows, highs = [], []
    for (lo, hi), unit in zip(shell_windows(a, delta, scale, convention), spectrum.value_unit):
        # lo <= lambda * unit < hi
        lows.append(math.ceil(lo / unit))
        highs.append(math.ceil(hi / unit) - 1)
    return _count_box(spectrum, lows, highs)


def _hits(spectrum: SpectrumLike, thresholds: Sequence[Fraction], edge: str) -> List[BoundaryHit]:
    hits = []
    for observable, (t, unit) in enumerate(zip(thresholds, spectrum.value_unit)):
        ratio = t / unit
        if ratio.denominator == 1 and int(ratio) in set(spectrum.distinct_values(observable)):
            hits.append((observable, edge, int(ratio)))
    return hits


def boundary_hits(
    spectrum: SpectrumLike,
    a,
    scale: int,
    delta=None,
    convention: Optional[ShellConvention] = None,
) -> List[BoundaryHit]:
    """Observables whose threshold coincides with an eigenvalue present in the spectrum.

    Without ``delta`` the downward thresholds X a_l are checked; with it, the
    two shell corners.
    """
    a = Macrostate.coerce(a)
    _check(spectrum, a, scale)
    if delta is None:
        return _hits(spectrum, [scale * d for d in a.densities], "downward")
    delta = _positive_delta(delta)
    windows = shell_windows(a, delta, scale, convention or ShellConvention())
    return _hits(spectrum, [lo for lo, _ in windows], "lower") + _hits(
        spectrum, [hi for _, hi in windows], "upper"
    )


def count_report(
    spectrum: SpectrumLike, a, delta, scale: int, convention: Optional[ShellConvention] = None
) -> CountReport:
    a = Macrostate.coerce(a)
    convention = convention or ShellConvention()
    delta = _positive_delta(delta)
    shell = shell_dimension(spectrum, a, delta, scale, convention)
    windows = shell_windows(a, delta, scale, convention)
    upper = count_at_thresholds(spectrum, [hi for _, hi in windows])
    lower = count_at_thresholds(spectrum, [lo for lo, _ in windows])
    difference = upper - lower
    return CountReport(
        scale=scale,
        shell=shell,
        upper_downward=upper,
        lower_downward=lower,
        corner_difference=difference,
        boundary_hits=boundary_hits(spectrum, a, scale, delta, convention),
        agrees=shell == difference,
    )
