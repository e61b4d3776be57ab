from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from accessibility.eta import construct_delta_prime
from accessibility.majorization import flat_convertible_at_scale
from channels.distance import finite_entropy_gap, impossibility_bound, min_capped_trace_distance, nested_flat_pair
from channels.t_transform import t_transform_chain
from config.defaults import get_defaults
from microcanonical.counting import shell_dimension
from models.errors import ComputationFailure, ValidationFailure
from models.macrostate import Macrostate, ShellConvention
from models.schedule import DeltaSchedule, LimitEstimate
from models.system import ModelSystem
from models.verdict import ScaleEvidence, Verdict
from regularization.bounds import strict_increase_screen, tail_proxies, upper_lower_entropy
from regularization.sequence import entropy_density_sequence
from spectra.convolution import spectrum_for


class VerdictConfig(BaseModel):
    """Scales, schedule family and margins shared by every decision procedure"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    scales: List[int] = Field(min_length=1)
    schedules: List[DeltaSchedule] = Field(min_length=1)
    convention: ShellConvention = ShellConvention()
    floor: float = Field(default=1e-4, ge=0)
    tail_fraction: float = Field(default=0.5, gt=0, le=1)
    min_scale: Optional[int] = None
    extrapolate: bool = True
    bump: float = Field(default=0.01, gt=0)
    slope_threshold: float = Field(default=1e-6, ge=0)
    scan_range: Optional[Tuple[float, float]] = None
    # finite-scale witnesses are built only while max(D, D') <= chain_cap
    chain_cap: int = Field(default=4096, ge=1)
    map_tolerance: float = Field(default=1e-12, gt=0)
    witness_tolerance: float = Field(default=1e-9, gt=0)
    normalization_tolerance: float = Field(default=1e-12, gt=0)

    @classmethod
    def from_scenario(cls, scenario) -> "VerdictConfig":
        margins = scenario.margins
        tolerances = scenario.tolerances
        return cls(
            scales=scenario.scales,
            schedules=scenario.schedules,
            convention=scenario.convention,
            floor=margins.absolute_floor,
            tail_fraction=margins.tail_fraction,
            min_scale=margins.min_scale,
            extrapolate=margins.extrapolate,
            bump=margins.bump_size,
            slope_threshold=margins.slope_threshold,
            chain_cap=get_defaults()["chain_cap"],
            map_tolerance=tolerances.map,
            witness_tolerance=tolerances.witness,
            normalization_tolerance=tolerances.normalization,
        )

    @classmethod
    def with_defaults(cls, scales: Sequence[int], schedules: Sequence[DeltaSchedule], **overrides) -> "VerdictConfig":
        defaults = get_defaults()
        settings = {
            "floor": defaults["margin_floor"],
            "tail_fraction": defaults["tail_fraction"],
            "bump": defaults["bump_size"],
            "slope_threshold": defaults["slope_threshold"],
            "convention": ShellConvention(mode=defaults["convention"]),
            "chain_cap": defaults["chain_cap"],
            "map_tolerance": defaults["map_tolerance"],
            "witness_tolerance": defaults["witness_tolerance"],
            "normalization_tolerance": defaults["normalization_tolerance"],
        }
        settings.update(overrides)
        return cls(scales=list(scales), schedules=list(schedules), **settings)

    @property
    def x0(self) -> int:
        return self.min_scale if self.min_scale is not None else min(self.scales)

    @property
    def family_ids(self) -> List[str]:
        return [schedule.id for schedule in self.schedules]


def _base(a: Macrostate, a_prime: Macrostate, config: VerdictConfig, basis: str) -> Dict:
    return {
        "source": a,
        "target": a_prime,
        "basis": basis,
        "min_scale": config.x0,
        "convention": config.convention.mode,
        "schedule_family": config.family_ids,
    }


def impossibility_evidence(
    model: ModelSystem,
    a,
    a_prime,
    config: VerdictConfig,
    schedule: Optional[DeltaSchedule] = None,
    schedule_prime: Optional[DeltaSchedule] = None,
) -> List[ScaleEvidence]:
    """Per-scale shell counts D, D' with the trace-distance bound 1/2 (1 - exp(-X ds / 2)).

    ``trace_distance`` is the smallest distance any unital image of the
    source flat state can reach from the target flat state, 1 - D'/D.
    """
    a = Macrostate.coerce(a)
    a_prime = Macrostate.coerce(a_prime)
    schedule = schedule or config.schedules[0]
    schedule_prime = schedule_prime or schedule
    rows = []
    for scale in config.scales:
        spectrum = spectrum_for(model, scale)
        delta, delta_prime = schedule.delta_at(scale), schedule_prime.delta_at(scale)
        dimension = shell_dimension(spectrum, a, delta, scale, config.convention)
        dimension_prime = shell_dimension(spectrum, a_prime, delta_prime, scale, config.convention)
        if dimension == 0 or dimension_prime == 0:
            rows.append(ScaleEvidence(scale=scale, delta=delta, delta_prime=delta_prime, dimension=dimension,
                                      dimension_prime=dimension_prime, note="empty shell"))
            continue
        gap = finite_entropy_gap(dimension, dimension_prime, scale)
        bound = impossibility_bound(gap, scale)
        rows.append(
            ScaleEvidence(
                scale=scale,
                delta=delta,
                delta_prime=delta_prime,
                dimension=dimension,
                dimension_prime=dimension_prime,
                convertible=flat_convertible_at_scale(dimension, dimension_prime),
                entropy_gap=gap,
                bound=bound.value,
                trace_distance=min_capped_trace_distance(dimension, dimension_prime),
                exceeds_one_third=bound.exceeds_one_third,
                note="vacuous bound" if bound.vacuous else "",
            )
        )
    return rows


def _compare(gap: float, margin: float) -> str:
    if gap > margin:
        return "possible"
    if gap < -margin:
        return "impossible"
    return "indeterminate"


def verdict_theorem1(model: ModelSystem, a, a_prime, config: VerdictConfig) -> Verdict:
    """Single-entropy criterion: a -> a' iff S[a] <= S[a'] for a strictly increasing entropy.

    The entropy is estimated from downward counts. A strict gap beyond the
    combined error bars decides directly; otherwise the delta' construction
    is attempted and succeeds only if every scale >= X0 verifies.
    """
    a = Macrostate.coerce(a)
    a_prime = Macrostate.coerce(a_prime)
    base = _base(a, a_prime, config, "theorem1")

    try:
        screen = strict_increase_screen(model, a, config.scales, config.bump, config.slope_threshold)
        screen_prime = strict_increase_screen(model, a_prime, config.scales, config.bump, config.slope_threshold)
    except ComputationFailure as e:
        return Verdict(decision="indeterminate", reason=f"entropy estimate unavailable: {e}", **base)
    screening = {"source": screen.slopes, "target": screen_prime.slopes}
    estimates = {"source": screen.base, "target": screen_prime.base}
    if not (screen.passed and screen_prime.passed):
        return Verdict(
            decision="indeterminate",
            reason="strict-increase screening failed",
            screening=screening,
            estimates=estimates,
            **base,
        )

    gap = screen_prime.base.value - screen.base.value
    margin = screen.base.error_bar + screen_prime.base.error_bar + config.floor
    decision = _compare(gap, margin)
    if decision == "possible":
        return Verdict(decision=decision, branch="strict-gap", reason="target entropy exceeds source",
                       gap=gap, margin=margin, screening=screening, estimates=estimates, **base)
    if decision == "impossible":
        return Verdict(
            decision=decision,
            branch="strict-gap",
            reason="source entropy exceeds target",
            gap=gap,
            margin=margin,
            screening=screening,
            estimates=estimates,
            scale_evidence=impossibility_evidence(model, a, a_prime, config),
            **base,
        )

    if config.convention.mode != "multiplicative":
        return Verdict(decision="indeterminate", branch="equal-entropy", gap=gap, margin=margin,
                       reason="the delta' construction needs the multiplicative convention",
                       screening=screening, estimates=estimates, **base)
    construction = construct_delta_prime(
        model, a, a_prime, config.schedules[0], config.scales, config.scan_range, config.convention
    )
    rows = [
        ScaleEvidence(scale=step.scale, delta=step.delta, delta_prime=step.delta_prime,
                      convertible=step.verified, note=step.note)
        for step in construction.steps
    ]
    tested = [step for step in construction.steps if step.scale >= config.x0]
    verified = bool(tested) and all(step.verified for step in tested)
    return Verdict(
        decision="possible" if verified else "indeterminate",
        branch="equal-entropy",
        reason="delta' sandwich verified at every tested scale" if verified
        else "delta' sandwich fails at scales " + ", ".join(str(x) for x in construction.failed_scales()),
        gap=gap,
        margin=margin,
        screening=screening,
        estimates=estimates,
        scale_evidence=rows,
        delta_prime=construction,
        **base,
    )


def verdict_theorem2(model: ModelSystem, a, a_prime, config: VerdictConfig) -> Verdict:
    """Two-entropy criterion: possible if upper(a) < lower(a'), impossible if lower(a) > upper(a')"""
    a = Macrostate.coerce(a)
    a_prime = Macrostate.coerce(a_prime)
    base = _base(a, a_prime, config, "theorem2")
    try:
        upper, lower = upper_lower_entropy(model, a, config.schedules, config.scales, config.tail_fraction,
                                           config.extrapolate, config.convention)
        upper_prime, lower_prime = upper_lower_entropy(model, a_prime, config.schedules, config.scales,
                                                       config.tail_fraction, config.extrapolate, config.convention)
    except ComputationFailure as e:
        return Verdict(decision="indeterminate", reason=f"entropy estimate unavailable: {e}", **base)
    estimates = {
        "upper_source": upper,
        "lower_source": lower,
        "upper_target": upper_prime,
        "lower_target": lower_prime,
    }
    return _two_sided(model, a, a_prime, config, base, estimates, upper, lower, upper_prime, lower_prime)


def _two_sided(
    model: ModelSystem,
    a: Macrostate,
    a_prime: Macrostate,
    config: VerdictConfig,
    base: Dict,
    estimates: Dict[str, LimitEstimate],
    upper: LimitEstimate,
    lower: LimitEstimate,
    upper_prime: LimitEstimate,
    lower_prime: LimitEstimate,
    schedule: Optional[DeltaSchedule] = None,
    schedule_prime: Optional[DeltaSchedule] = None,
) -> Verdict:
    forward = lower_prime.value - upper.value
    forward_margin = upper.error_bar + lower_prime.error_bar + config.floor
    if forward > forward_margin:
        return Verdict(decision="possible", branch="upper-below-lower", gap=forward, margin=forward_margin,
                       reason="upper entropy of the source lies below the lower entropy of the target",
                       estimates=estimates, **base)

    backward = lower.value - upper_prime.value
    backward_margin = lower.error_bar + upper_prime.error_bar + config.floor
    if backward > backward_margin:
        return Verdict(
            decision="impossible",
            branch="lower-above-upper",
            gap=-backward,
            margin=backward_margin,
            reason="lower entropy of the source lies above the upper entropy of the target",
            estimates=estimates,
            scale_evidence=impossibility_evidence(model, a, a_prime, config, schedule, schedule_prime),
            **base,
        )
    return Verdict(decision="indeterminate", gap=forward, margin=forward_margin,
                   reason="entropy bounds overlap within margins", estimates=estimates, **base)


def verdict_lemma4(
    model: ModelSystem,
    a,
    schedule: DeltaSchedule,
    a_prime,
    schedule_prime: DeltaSchedule,
    config: VerdictConfig,
) -> Verdict:
    """Schedule-level criterion from the tail limsup / liminf of each pair's own sequence"""
    a = Macrostate.coerce(a)
    a_prime = Macrostate.coerce(a_prime)
    if schedule is None or schedule_prime is None:
        raise ValidationFailure("lemma4 verdicts need a schedule for each side")
    base = _base(a, a_prime, config, "lemma4")
    base["schedule_family"] = [schedule.id, schedule_prime.id]
    try:
        seq = entropy_density_sequence(model, a, schedule, config.scales, config.convention)
        seq_prime = entropy_density_sequence(model, a_prime, schedule_prime, config.scales, config.convention)
    except ComputationFailure as e:
        return Verdict(decision="indeterminate", reason=f"entropy sequence unavailable: {e}", **base)
    upper, lower = tail_proxies(seq, config.tail_fraction, config.extrapolate)
    upper_prime, lower_prime = tail_proxies(seq_prime, config.tail_fraction, config.extrapolate)
    estimates = {
        "upper_source": upper,
        "lower_source": lower,
        "upper_target": upper_prime,
        "lower_target": lower_prime,
    }
    return _two_sided(model, a, a_prime, config, base, estimates, upper, lower, upper_prime, lower_prime,
                      schedule, schedule_prime)


def _with_witness(row: ScaleEvidence, config: VerdictConfig) -> ScaleEvidence:
    if max(row.dimension, row.dimension_prime) > config.chain_cap:
        return row
    p, q = nested_flat_pair(row.dimension, row.dimension_prime)
    witness = t_transform_chain(
        p,
        q,
        cap=config.chain_cap,
        witness_tolerance=config.witness_tolerance,
        map_tolerance=config.map_tolerance,
        normalization_tolerance=config.normalization_tolerance,
    )
    return row.model_copy(update={"witness_steps": len(witness.transforms)})


def verdict_finite_scale(
    model: ModelSystem,
    a,
    a_prime,
    config: VerdictConfig,
    schedule: Optional[DeltaSchedule] = None,
    schedule_prime: Optional[DeltaSchedule] = None,
) -> Verdict:
    """Exact flat-state convertibility D <= D' at every tested scale >= X0.

    Convertible scales small enough for the chain cap also carry an explicit
    T-transform witness, built with the configured tolerances.
    """
    a = Macrostate.coerce(a)
    a_prime = Macrostate.coerce(a_prime)
    schedule = schedule or config.schedules[0]
    schedule_prime = schedule_prime or schedule
    base = _base(a, a_prime, config, "finite-scale")
    base["schedule_family"] = [schedule.id, schedule_prime.id]
    rows = [
        _with_witness(row, config) if row.convertible else row
        for row in impossibility_evidence(model, a, a_prime, config, schedule, schedule_prime)
    ]
    tested = [row for row in rows if row.scale >= config.x0]
    if tested and all(row.convertible for row in tested):
        decision, reason = "possible", "D <= D' at every tested scale"
    elif tested and all(row.convertible is False for row in tested):
        decision, reason = "impossible", "D > D' at every tested scale"
    else:
        decision, reason = "indeterminate", "convertibility changes across tested scales"
    return Verdict(decision=decision, reason=reason, scale_evidence=rows, **base)


def decide(
    model: ModelSystem,
    a,
    a_prime,
    basis: str,
    config: VerdictConfig,
    schedule: Optional[DeltaSchedule] = None,
    schedule_prime: Optional[DeltaSchedule] = None,
) -> Verdict:
    if basis == "theorem1":
        return verdict_theorem1(model, a, a_prime, config)
    if basis == "theorem2":
        return verdict_theorem2(model, a, a_prime, config)
    if basis == "lemma4":
        return verdict_lemma4(model, a, schedule or config.schedules[0], a_prime,
                              schedule_prime or schedule or config.schedules[0], config)
    if basis == "finite-scale":
        return verdict_finite_scale(model, a, a_prime, config, schedule, schedule_prime)
    raise ValidationFailure(f"unknown basis '{basis}'")
