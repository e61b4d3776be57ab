from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.macrostate import Macrostate
from models.rational import ExactRational, ExtendedRational
from models.schedule import DeltaSchedule, LimitEstimate

Decision = Literal["possible", "impossible", "indeterminate"]
Basis = Literal["theorem1", "theorem2", "lemma4", "finite-scale"]


class EtaWindow(BaseModel):
    """Admissible relative shifts eta of a' that keep D(a'(1+eta)) between the two bounds.

    The window is [lo, hi) intersected with the scan range. An empty window
    stores lo=+inf, hi=-inf and carries the jump location in ``eta_boundary``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scale: int = Field(ge=1)
    lo: ExtendedRational
    hi: ExtendedRational
    empty: bool
    eta_boundary: Optional[ExactRational] = None
    lower_bound: int = 0
    upper_bound: int = 0
    lo_clamped: bool = False
    hi_clamped: bool = False

    @model_validator(mode="after")
    def _consistent(self) -> "EtaWindow":
        if self.empty != (self.lo > self.hi):
            raise ValueError("empty must hold exactly when lo > hi")
        if self.empty and self.eta_boundary is None:
            raise ValueError("an empty window needs its jump location")
        return self

    @property
    def width(self):
        return 0 if self.empty else self.hi - self.lo


class DeltaPrimeStep(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scale: int
    delta: ExactRational
    window: Optional[EtaWindow] = None
    eta_plus: Optional[ExactRational] = None
    eta_minus: Optional[ExactRational] = None
    delta_prime: Optional[ExactRational] = None
    upper_sandwich: bool = False
    lower_sandwich: bool = False
    note: str = ""

    @property
    def verified(self) -> bool:
        return self.upper_sandwich and self.lower_sandwich


class DeltaPrimeConstruction(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    schedule: Optional[DeltaSchedule] = None
    steps: Tuple[DeltaPrimeStep, ...]
    trend_slope: Optional[float] = None
    decreasing: bool = False

    @property
    def verified(self) -> bool:
        return bool(self.steps) and all(step.verified for step in self.steps)

    def failed_scales(self) -> List[int]:
        return [step.scale for step in self.steps if not step.verified]


class ScaleEvidence(BaseModel):
    """One row of per-scale evidence attached to a verdict"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scale: int
    delta: Optional[ExactRational] = None
    delta_prime: Optional[ExactRational] = None
    dimension: Optional[int] = None
    dimension_prime: Optional[int] = None
    convertible: Optional[bool] = None
    entropy_gap: Optional[float] = None
    bound: Optional[float] = None
    trace_distance: Optional[float] = None
    exceeds_one_third: Optional[bool] = None
    witness_steps: Optional[int] = None
    note: str = ""


class Verdict(BaseModel):
    """Accessibility decision for an ordered pair a -> a' with the evidence it rests on"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    source: Macrostate
    target: Macrostate
    decision: Decision
    basis: Basis
    branch: Optional[str] = None
    reason: str = ""
    gap: Optional[float] = None
    margin: Optional[float] = None
    min_scale: int = 1
    convention: str = "multiplicative"
    schedule_family: List[str] = Field(default_factory=list)
    estimates: Dict[str, LimitEstimate] = Field(default_factory=dict)
    screening: Dict[str, List[float]] = Field(default_factory=dict)
    scale_evidence: List[ScaleEvidence] = Field(default_factory=list)
    delta_prime: Optional[DeltaPrimeConstruction] = None
    convexity_checked: bool = False

    @model_validator(mode="after")
    def _finite_scale_support(self) -> "Verdict":
        if self.basis == "finite-scale" and self.decision == "possible":
            tested = [row for row in self.scale_evidence if row.scale >= self.min_scale]
            if not tested or not all(row.convertible for row in tested):
                raise ValueError("a finite-scale 'possible' needs D <= D' at every tested scale >= X0")
        return self

    @property
    def pair_name(self) -> str:
        return f"{self.source.describe()}__{self.target.describe()}__{self.basis}"
