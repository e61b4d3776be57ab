import math
from fractions import Fraction
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.macrostate import Macrostate
from models.rational import ExactRational, to_fraction

ScheduleForm = Literal["power", "table", "constant-then-decay"]
LimitMethod = Literal["last-point", "richardson", "affine-fit", "schedule-fit"]


def _slug(value: Fraction) -> str:
    return str(value).replace("/", "_")


class DeltaSchedule(BaseModel):
    """A vanishing family of shell half-widths delta_X.

    power:               c * X^(-alpha)
    table:               step function through (X, delta) pairs; scales before
                         the first entry use the first value
    constant-then-decay: plateau up to switch_scale, then
                         plateau * (X / switch_scale)^(-alpha)
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: str = ""
    form: ScheduleForm
    coefficient: ExactRational = Fraction(1)
    exponent: ExactRational = Fraction(0)
    table: Tuple[Tuple[int, ExactRational], ...] = ()
    plateau: Optional[ExactRational] = None
    switch_scale: Optional[int] = None
    require_decreasing: bool = False

    @model_validator(mode="after")
    def _check_form(self) -> "DeltaSchedule":
        if self.form == "power":
            if self.coefficient <= 0:
                raise ValueError("power schedule needs c > 0")
            if self.exponent <= 0:
                raise ValueError("power schedule needs alpha > 0 so that delta_X -> 0")
        elif self.form == "table":
            if not self.table:
                raise ValueError("table schedule needs at least one (X, delta) entry")
            scales = [scale for scale, _ in self.table]
            if any(scale < 1 for scale in scales):
                raise ValueError("table scales must be positive")
            if any(later <= earlier for earlier, later in zip(scales, scales[1:])):
                raise ValueError("table scales must be strictly increasing")
            if any(delta <= 0 for _, delta in self.table):
                raise ValueError("table deltas must be positive")
            if self.require_decreasing and not self.is_eventually_decreasing():
                raise ValueError("table schedule must be eventually decreasing")
        else:
            if self.plateau is None or self.plateau <= 0:
                raise ValueError("constant-then-decay schedule needs a positive plateau")
            if self.switch_scale is None or self.switch_scale < 1:
                raise ValueError("constant-then-decay schedule needs switch_scale >= 1")
            if self.exponent <= 0:
                raise ValueError("constant-then-decay schedule needs alpha > 0")
        if not self.id:
            object.__setattr__(self, "id", self.default_id())
        return self

    @classmethod
    def power(cls, coefficient, exponent, id: str = "") -> "DeltaSchedule":
        return cls(id=id, form="power", coefficient=coefficient, exponent=exponent)

    @classmethod
    def constant(cls, value, id: str = "") -> "DeltaSchedule":
        return cls(id=id, form="table", table=((1, value),))

    @classmethod
    def from_table(cls, pairs, id: str = "", require_decreasing: bool = False) -> "DeltaSchedule":
        return cls(id=id, form="table", table=tuple(pairs), require_decreasing=require_decreasing)

    def default_id(self) -> str:
        if self.form == "power":
            return f"power-c{_slug(self.coefficient)}-a{_slug(self.exponent)}"
        if self.form == "table":
            if len(self.table) == 1:
                return f"constant-{_slug(self.table[0][1])}"
            return f"table-{len(self.table)}"
        return f"plateau-{_slug(self.plateau)}-x{self.switch_scale}-a{_slug(self.exponent)}"

    def is_eventually_decreasing(self) -> bool:
        """Last entry is the minimum, and strictly below the first when there are several"""
        values = [delta for _, delta in self.table]
        if not values:
            return False
        if values[-1] != min(values):
            return False
        return len(values) == 1 or values[-1] < values[0]

    def delta_at(self, scale: int) -> Fraction:
        if scale < 1:
            raise ValueError("scales start at 1")
        if self.form == "power":
            return to_fraction(float(self.coefficient) * scale ** (-float(self.exponent)))
        if self.form == "table":
            current = self.table[0][1]
            for start, delta in self.table:
                if start > scale:
                    break
                current = delta
            return current
        if scale <= self.switch_scale:
            return self.plateau
        ratio = scale / self.switch_scale
        return to_fraction(float(self.plateau) * ratio ** (-float(self.exponent)))

    def values(self, scales: List[int]) -> List[Fraction]:
        return [self.delta_at(scale) for scale in scales]


class EntropyPoint(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scale: int = Field(ge=1)
    dimension: int = Field(ge=1)
    density: float
    delta: Optional[ExactRational] = None
    boundary: bool = False

    @model_validator(mode="after")
    def _finite(self) -> "EntropyPoint":
        if not math.isfinite(self.density):
            raise ValueError("entropy density must be finite")
        return self


class EntropySequence(BaseModel):
    """s_X = (1/X) ln D over a scale grid, for one macrostate and one schedule"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    macrostate: Macrostate
    schedule_id: str
    tag: Literal["shell", "downward"]
    convention: str = "multiplicative"
    points: Tuple[EntropyPoint, ...]
    dropped_scales: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def _increasing(self) -> "EntropySequence":
        scales = [point.scale for point in self.points]
        if any(later <= earlier for earlier, later in zip(scales, scales[1:])):
            raise ValueError("sequence scales must be strictly increasing")
        return self

    def __len__(self) -> int:
        return len(self.points)

    @property
    def scales(self) -> List[int]:
        return [point.scale for point in self.points]

    @property
    def densities(self) -> List[float]:
        return [point.density for point in self.points]

    def tail_length(self, fraction: float) -> int:
        if not 0 < fraction <= 1:
            raise ValueError("tail fraction must lie in (0, 1]")
        return min(len(self.points), max(1, math.ceil(fraction * len(self.points))))


class LimitEstimate(BaseModel):
    """Finite-size proxy for a limit, with the residual of the method that produced it"""

    model_config = ConfigDict(frozen=True)

    value: float
    error_bar: float = Field(ge=0)
    method: LimitMethod
    tail_window: Tuple[int, ...]
    note: str = ""


class GapStep(BaseModel):
    """Gap inequality s-(X) - s+(X) <= -1/sqrt(X) evaluated at one step boundary"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    epsilon: ExactRational
    scale: int
    gap: float
    threshold: float
    holds: bool


class Delta0Construction(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    schedule: DeltaSchedule
    steps: Tuple[GapStep, ...]

    @property
    def verified(self) -> bool:
        return all(step.holds for step in self.steps)
