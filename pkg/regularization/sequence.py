from typing import Dict, List, Optional, Sequence, Union

from microcanonical.counting import boundary_hits, downward_dimension, shell_dimension
from microcanonical.states import boltzmann_entropy
from models.errors import EmptyShellError, ValidationFailure
from models.macrostate import Macrostate, ShellConvention
from models.schedule import DeltaSchedule, EntropyPoint, EntropySequence, LimitEstimate
from models.system import ModelSystem
from spectra.convolution import spectrum_for

DOWNWARD = "downward"


def _check_scales(scales: Sequence[int]) -> List[int]:
    scales = list(scales)
    if not scales:
        raise ValidationFailure("at least one scale is required")
    if any(isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in scales):
        raise ValidationFailure("scales must be positive integers")
    if any(later <= earlier for earlier, later in zip(scales, scales[1:])):
        raise ValidationFailure("scales must be strictly increasing")
    return scales


def entropy_density_sequence(
    model: ModelSystem,
    a,
    schedule: Union[DeltaSchedule, str],
    scales: Sequence[int],
    convention: Optional[ShellConvention] = None,
    cap: Optional[int] = None,
) -> EntropySequence:
    """s_X = (1/X) ln D for D the shell dimension under ``schedule`` or, for "downward", D(a).

    Scales whose shell is empty are dropped and listed in ``dropped_scales``.
    """
    a = Macrostate.coerce(a)
    scales = _check_scales(scales)
    convention = convention or ShellConvention()
    downward = isinstance(schedule, str)
    if downward and schedule != DOWNWARD:
        raise ValidationFailure(f"unknown sequence tag '{schedule}'; pass a DeltaSchedule or 'downward'")

    points, dropped = [], []
    for scale in scales:
        spectrum = spectrum_for(model, scale, cap)
        if downward:
            delta = None
            dimension = downward_dimension(spectrum, a, scale)
            hits = boundary_hits(spectrum, a, scale)
        else:
            delta = schedule.delta_at(scale)
            dimension = shell_dimension(spectrum, a, delta, scale, convention)
            hits = boundary_hits(spectrum, a, scale, delta, convention)
        if dimension == 0:
            dropped.append(scale)
            continue
        points.append(
            EntropyPoint(
                scale=scale,
                dimension=dimension,
                density=boltzmann_entropy(dimension) / scale,
                delta=delta,
                boundary=bool(hits),
            )
        )

    if not points:
        raise EmptyShellError(f"every shell around {a.describe()} is empty on the tested scales")
    return EntropySequence(
        macrostate=a,
        schedule_id=DOWNWARD if downward else schedule.id,
        tag="downward" if downward else "shell",
        convention=convention.mode,
        points=tuple(points),
        dropped_scales=tuple(dropped),
    )


def residual_f(
    model: ModelSystem,
    a,
    schedule: DeltaSchedule,
    scale: int,
    reference: LimitEstimate,
    convention: Optional[ShellConvention] = None,
) -> float:
    """s_X - reference.value at one scale.

    The reference is itself an estimate, so this is a diagnostic of how fast
    the sequence settles, not a distance to the true limit.
    """
    a = Macrostate.coerce(a)
    spectrum = spectrum_for(model, scale)
    delta = schedule.delta_at(scale)
    dimension = shell_dimension(spectrum, a, delta, scale, convention or ShellConvention())
    return boltzmann_entropy(dimension) / scale - reference.value


def gamma_residuals(seq: EntropySequence, upper: LimitEstimate, lower: LimitEstimate) -> Dict[str, List[float]]:
    """Excursions of s_X above the upper proxy and below the lower proxy, per scale"""
    return {
        "scales": [float(x) for x in seq.scales],
        "gamma_upper": [max(s - upper.value, 0.0) for s in seq.densities],
        "gamma_lower": [max(lower.value - s, 0.0) for s in seq.densities],
    }


def residual_decay(values: Sequence[float]) -> bool:
    """Soft check: |f| nonincreasing along the sequence (reported, never asserted)"""
    magnitudes = [abs(v) for v in values]
    return all(later <= earlier + 1e-15 for earlier, later in zip(magnitudes, magnitudes[1:]))

