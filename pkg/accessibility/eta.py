import math
from fractions import Fraction
from itertools import accumulate
from typing import Dict, List, Optional, Sequence, Tuple

from config.defaults import get_defaults
from microcanonical.counting import downward_dimension
from models.errors import DegenerateWindowError, ValidationFailure
from models.macrostate import Macrostate, ShellConvention
from models.rational import to_fraction
from models.schedule import DeltaSchedule
from models.system import ModelSystem
from models.verdict import DeltaPrimeConstruction, DeltaPrimeStep, EtaWindow
from regularization.bounds import schedule_trend
from spectra.convolution import SpectrumLike, spectrum_for


def _breakpoints(spectrum: SpectrumLike, a_prime: Macrostate, scale: int) -> Tuple[List[Fraction], List[int], int]:
    """Sorted scale factors s with cumulative D(a' s), plus the count present at every s.

    A tuple lambda enters the downward set of a' s once s >= max_l lambda_l u_l / (X a'_l);
    components with a'_l = 0 admit only lambda_l u_l <= 0, for every s.
    """
    jumps: Dict[Fraction, int] = {}
    always = 0
    for values, multiplicity in spectrum.iter_entries():
        entry = None
        for value, unit, density in zip(values, spectrum.value_unit, a_prime.densities):
            level = value * unit
            if density == 0:
                if level > 0:
                    break
                continue
            term = level / (scale * density)
            if entry is None or term > entry:
                entry = term
        else:
            if entry is None:
                always += multiplicity
            else:
                jumps[entry] = jumps.get(entry, 0) + multiplicity
    points = sorted(jumps)
    return points, list(accumulate((jumps[p] for p in points), initial=always))[1:], always


def _first_reaching(points: List[Fraction], cumulative: List[int], predicate) -> Optional[Fraction]:
    for point, count in zip(points, cumulative):
        if predicate(count):
            return point
    return None


def eta_window(
    model: ModelSystem,
    a,
    a_prime,
    delta,
    scale: int,
    scan_range: Optional[Sequence] = None,
    convention: Optional[ShellConvention] = None,
) -> EtaWindow:
    """Set of eta with D(a(1-delta)) <= D(a'(1+eta)) <= D(a(1+delta)), found exactly.

    D(a'(1+eta)) is a right-continuous step function of eta, so the set is a
    half-open interval [lo, hi): lo is where the count first reaches the lower
    bound and hi where it first exceeds the upper one. Endpoints are clamped
    to ``scan_range``; an empty window records lo, the jump where the count
    first reaches the lower bound, as ``eta_boundary``.
    """
    convention = convention or ShellConvention()
    if convention.mode != "multiplicative":
        raise ValidationFailure("eta windows are defined for the multiplicative convention only")
    a = Macrostate.coerce(a)
    a_prime = Macrostate.coerce(a_prime)
    if any(density < 0 for density in a_prime.densities):
        raise ValidationFailure(f"eta window needs nonnegative target densities, got {a_prime.describe()}")
    delta = to_fraction(delta)
    if delta <= 0:
        raise ValidationFailure(f"shell half-width must be positive, got {delta}")
    low_eta, high_eta = (to_fraction(v) for v in (scan_range or get_defaults()["eta_scan_range"]))
    if low_eta >= high_eta:
        raise ValidationFailure(f"empty eta scan range [{low_eta}, {high_eta}]")

    spectrum = spectrum_for(model, scale)
    lower = downward_dimension(spectrum, a.scaled(1 - delta), scale)
    upper = downward_dimension(spectrum, a.scaled(1 + delta), scale)
    if lower == 0:
        raise DegenerateWindowError(
            f"D({a.describe()} (1 - {delta})) = 0 at X={scale}; the lower bound is degenerate"
        )

    points, cumulative, always = _breakpoints(spectrum, a_prime, scale)
    if always > upper:
        raise DegenerateWindowError(
            f"D({a_prime.describe()} (1 + eta)) exceeds {upper} for every eta at X={scale}"
        )
    if always >= lower:
        lo = -math.inf
    else:
        reach = _first_reaching(points, cumulative, lambda count: count >= lower)
        if reach is None:
            raise DegenerateWindowError(
                f"D({a_prime.describe()} (1 + eta)) never reaches {lower} at X={scale}"
            )
        lo = reach - 1
    exceed = _first_reaching(points, cumulative, lambda count: count > upper)
    hi = math.inf if exceed is None else exceed - 1
    lo_clamped = lo < low_eta
    hi_clamped = hi > high_eta
    lo_eff = max(lo, low_eta)
    hi_eff = high_eta if hi_clamped else hi

    if lo_eff >= hi_eff:
        return EtaWindow(
            scale=scale,
            lo=math.inf,
            hi=-math.inf,
            empty=True,
            eta_boundary=lo if lo != -math.inf else low_eta,
            lower_bound=lower,
            upper_bound=upper,
        )
    return EtaWindow(
        scale=scale,
        lo=lo_eff,
        hi=hi_eff,
        empty=False,
        lower_bound=lower,
        upper_bound=upper,
        lo_clamped=lo_clamped,
        hi_clamped=hi_clamped,
    )


def eta_plus_minus(window: EtaWindow) -> Tuple[Fraction, Fraction]:
    """eta+ = inf/3 + 2 sup/3 and eta- = 2 inf/3 + sup/3; an empty window gives eta_X +- 1/X"""
    if window.empty:
        step = Fraction(1, window.scale)
        return window.eta_boundary + step, window.eta_boundary - step
    lo, hi = to_fraction(window.lo), to_fraction(window.hi)
    return lo / 3 + 2 * hi / 3, 2 * lo / 3 + hi / 3


def construct_delta_prime(
    model: ModelSystem,
    a,
    a_prime,
    schedule: DeltaSchedule,
    scales: Sequence[int],
    scan_range: Optional[Sequence] = None,
    convention: Optional[ShellConvention] = None,
) -> DeltaPrimeConstruction:
    """delta'_X = 4 max(|eta+|, |eta-|) per scale, with both strict sandwich checks.

    A scale is verified when D(a(1+delta)) < D(a'(1+delta')) and
    D(a'(1-delta')) < D(a(1-delta)) hold on direct counts. Scales whose
    window is degenerate are kept as unverified steps with a note.
    """
    a = Macrostate.coerce(a)
    a_prime = Macrostate.coerce(a_prime)
    scales = sorted(scales)
    if not scales:
        raise ValidationFailure("at least one scale is required")

    steps, table = [], []
    for scale in scales:
        delta = schedule.delta_at(scale)
        try:
            window = eta_window(model, a, a_prime, delta, scale, scan_range, convention)
        except DegenerateWindowError as e:
            steps.append(DeltaPrimeStep(scale=scale, delta=delta, note=str(e)))
            continue
        eta_plus, eta_minus = eta_plus_minus(window)
        delta_prime = 4 * max(abs(eta_plus), abs(eta_minus))
        if delta_prime == 0:
            steps.append(DeltaPrimeStep(scale=scale, delta=delta, window=window, eta_plus=eta_plus,
                                        eta_minus=eta_minus, delta_prime=delta_prime, note="delta' vanishes"))
            continue

        spectrum = spectrum_for(model, scale)
        upper_sandwich = downward_dimension(spectrum, a.scaled(1 + delta), scale) < downward_dimension(
            spectrum, a_prime.scaled(1 + delta_prime), scale
        )
        lower_sandwich = downward_dimension(spectrum, a_prime.scaled(1 - delta_prime), scale) < downward_dimension(
            spectrum, a.scaled(1 - delta), scale
        )
        steps.append(
            DeltaPrimeStep(
                scale=scale,
                delta=delta,
                window=window,
                eta_plus=eta_plus,
                eta_minus=eta_minus,
                delta_prime=delta_prime,
                upper_sandwich=upper_sandwich,
                lower_sandwich=lower_sandwich,
            )
        )
        table.append((scale, delta_prime))

    schedule_prime = DeltaSchedule.from_table(table, id="delta-prime") if table else None
    slope = schedule_trend(schedule_prime) if schedule_prime is not None else None
    return DeltaPrimeConstruction(
        schedule=schedule_prime,
        steps=tuple(steps),
        trend_slope=slope,
        decreasing=slope is not None and slope < 0,
    )
