import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from config.defaults import get_defaults
from microcanonical.counting import downward_dimension
from models.errors import GapConditionError, InsufficientPointsError, ValidationFailure
from models.macrostate import Macrostate, ShellConvention
from models.rational import to_fraction
from models.scenario import geometric_grid
from models.schedule import Delta0Construction, DeltaSchedule, EntropySequence, GapStep, LimitEstimate
from models.system import ModelSystem
from regularization.extrapolation import estimate_limit, schedule_fit
from regularization.sequence import DOWNWARD, entropy_density_sequence
from spectra.convolution import spectrum_for


class ScreenResult(BaseModel):
    """Finite-difference slopes of the downward entropy estimate, one per density component"""

    model_config = ConfigDict(frozen=True)

    passed: bool
    slopes: List[float]
    base: LimitEstimate
    threshold: float
    bump: float


def geometric_scales(start: Optional[int] = None, ratio: Optional[int] = None, count: Optional[int] = None) -> List[int]:
    grid = get_defaults()["scale_grid"]
    return geometric_grid(
        start if start is not None else grid["start"],
        ratio if ratio is not None else grid["ratio"],
        count if count is not None else grid["count"],
    )


def schedule_trend(schedule: DeltaSchedule) -> Optional[float]:
    """Log-log slope of a table schedule; negative means delta_X shrinks with X"""
    if schedule.form != "table" or len(schedule.table) < 2:
        return None
    x = np.log([float(scale) for scale, _ in schedule.table])
    y = np.log([float(delta) for _, delta in schedule.table])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def tail_proxies(seq: EntropySequence, tail_fraction: float, extrapolate: bool = True) -> Tuple[LimitEstimate, LimitEstimate]:
    """limsup / liminf proxies: max and min of s_X over the tail window.

    With ``extrapolate`` the tail values are first corrected by the
    schedule-aware fit (intercept plus residual), which strips the smooth
    finite-size drift while keeping any oscillation.
    """
    try:
        k = seq.tail_length(tail_fraction)
    except ValueError as e:
        raise ValidationFailure(str(e))
    if k < 1:
        raise InsufficientPointsError("tail window is empty")
    scales = seq.scales
    values = np.asarray(seq.densities, dtype=float)
    window = tuple(scales[-k:])

    if extrapolate and len(values) >= 2:
        deltas = [float(p.delta) for p in seq.points] if seq.tag == "shell" else None
        fit = schedule_fit(scales, values, deltas)
        tail = (values - (fit.fitted - fit.value))[-k:]
        method, error = "schedule-fit", fit.error
    else:
        tail = values[-k:]
        method = "last-point"
        error = abs(float(values[-1] - values[-2])) if len(values) > 1 else 0.0

    label = f"schedule {seq.schedule_id}"
    upper = LimitEstimate(value=float(np.max(tail)), error_bar=error, method=method, tail_window=window,
                          note=f"tail max, {label}")
    lower = LimitEstimate(value=float(np.min(tail)), error_bar=error, method=method, tail_window=window,
                          note=f"tail min, {label}")
    return upper, lower


def upper_lower_entropy(
    model: ModelSystem,
    a,
    schedules: Sequence[DeltaSchedule],
    scales: Sequence[int],
    tail_fraction: float = 0.5,
    extrapolate: bool = True,
    convention: Optional[ShellConvention] = None,
) -> Tuple[LimitEstimate, LimitEstimate]:
    """Upper and lower regularized entropy proxies over a declared schedule family.

    upper = max over schedules of the tail limsup proxy,
    lower = max over schedules of the tail liminf proxy, so lower <= upper.
    """
    if not schedules:
        raise ValidationFailure("schedule family is empty")
    if not 0 < tail_fraction <= 1:
        raise ValidationFailure(f"tail fraction must lie in (0, 1], got {tail_fraction}")

    upper: Optional[LimitEstimate] = None
    lower: Optional[LimitEstimate] = None
    for schedule in schedules:
        seq = entropy_density_sequence(model, a, schedule, scales, convention)
        candidate_upper, candidate_lower = tail_proxies(seq, tail_fraction, extrapolate)
        if upper is None or candidate_upper.value > upper.value:
            upper = candidate_upper
        if lower is None or candidate_lower.value > lower.value:
            lower = candidate_lower
    return upper, lower


def _gap(model: ModelSystem, a: Macrostate, epsilon, scale: int) -> float:
    spectrum = spectrum_for(model, scale)
    high = downward_dimension(spectrum, a.scaled(1 + epsilon), scale)
    low = downward_dimension(spectrum, a.scaled(1 - epsilon), scale)
    s_plus = math.log(high) / scale if high else -math.inf
    s_minus = math.log(low) / scale if low else -math.inf
    if s_plus == -math.inf:
        return math.inf
    return s_minus - s_plus


def _gap_step(model: ModelSystem, a: Macrostate, epsilon, scale: int) -> GapStep:
    gap = _gap(model, a, epsilon, scale)
    threshold = -1.0 / math.sqrt(scale)
    return GapStep(epsilon=epsilon, scale=scale, gap=gap, threshold=threshold, holds=gap <= threshold)


def delta0_schedule(model: ModelSystem, a, epsilons: Sequence, scales: Sequence[int]) -> Delta0Construction:
    """Step schedule delta0_X = eps_m on X_m <= X < X_{m+1}.

    X_eps is the smallest tested scale from which s-(X) - s+(X) <= -1/sqrt(X)
    holds at every larger tested scale, with s+-(X) = (1/X) ln D(a(1 +- eps)).
    This is stricter than the first scale where the gap holds once: a scale
    that passes but is followed by a failing one is not used, so the schedule
    satisfies the gap on every tested scale it covers. X_m is the first tested
    scale at or above max(X_eps_m, X_{m-1} + 1), and the gap is re-evaluated
    at each step boundary.
    """
    a = Macrostate.coerce(a)
    eps = [to_fraction(e) for e in epsilons]
    if not eps:
        raise ValidationFailure("at least one epsilon is required")
    if any(e <= 0 or e >= 1 for e in eps):
        raise ValidationFailure("epsilons must lie in (0, 1)")
    if any(later >= earlier for earlier, later in zip(eps, eps[1:])):
        raise ValidationFailure("epsilons must be strictly decreasing")
    scales = sorted(scales)
    if not scales:
        raise ValidationFailure("at least one scale is required")

    table, steps = [], []
    previous = 0
    for epsilon in eps:
        start = None
        for scale in reversed(scales):
            if _gap_step(model, a, epsilon, scale).holds:
                start = scale
            else:
                break
        if start is None:
            raise GapConditionError(epsilon, scales[-1])
        step_scale = next((scale for scale in scales if scale >= max(start, previous + 1)), None)
        if step_scale is None:
            # every tested scale from X_eps on already starts an earlier step
            raise GapConditionError(epsilon, scales[-1])
        table.append((step_scale, epsilon))
        steps.append(_gap_step(model, a, epsilon, step_scale))
        previous = step_scale

    schedule = DeltaSchedule.from_table(table, id="delta0")
    return Delta0Construction(schedule=schedule, steps=tuple(steps))


def strict_increase_screen(
    model: ModelSystem,
    a,
    scales: Sequence[int],
    bump: Optional[float] = None,
    threshold: Optional[float] = None,
) -> ScreenResult:
    """Check numerically that the entropy estimate grows when each density is bumped up"""
    defaults = get_defaults()
    bump = defaults["bump_size"] if bump is None else bump
    threshold = defaults["slope_threshold"] if threshold is None else threshold
    a = Macrostate.coerce(a)
    method = "affine-fit" if len(scales) >= 2 else "last-point"

    base = estimate_limit(entropy_density_sequence(model, a, DOWNWARD, scales), method)
    slopes = []
    for component in range(a.num_observables):
        bumped = a.bumped(component, bump)
        estimate = estimate_limit(entropy_density_sequence(model, bumped, DOWNWARD, scales), method)
        slopes.append((estimate.value - base.value) / bump)
    return ScreenResult(
        passed=all(slope >= threshold for slope in slopes),
        slopes=slopes,
        base=base,
        threshold=threshold,
        bump=bump,
    )
