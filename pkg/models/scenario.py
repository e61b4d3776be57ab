from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.macrostate import Macrostate, ShellConvention
from models.schedule import DeltaSchedule
from models.system import ModelSpec

BasisName = Literal["theorem1", "theorem2", "lemma4", "finite-scale"]


class Margins(BaseModel):
    absolute_floor: float = Field(default=1e-4, ge=0)
    tail_fraction: float = Field(default=0.5, gt=0, le=1)
    min_scale: Optional[int] = Field(default=None, ge=1)
    extrapolate: bool = True
    bump_size: float = Field(default=0.01, gt=0)
    slope_threshold: float = Field(default=1e-6, ge=0)


class Tolerances(BaseModel):
    map: float = Field(default=1e-12, gt=0)
    witness: float = Field(default=1e-9, gt=0)
    normalization: float = Field(default=1e-12, gt=0)


class PairSpec(BaseModel):
    """Ordered macrostate pair; lemma4 uses ``schedule`` for the source and ``schedule_prime`` for the target"""

    source: str
    target: str
    schedule: Optional[str] = None
    schedule_prime: Optional[str] = None


def geometric_grid(start: int, ratio: int, count: int) -> List[int]:
    if start < 1 or ratio < 2 or count < 1:
        raise ValueError("geometric grid needs start >= 1, integer ratio >= 2 and count >= 1")
    return [start * ratio ** k for k in range(count)]


class Scenario(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    version: Literal[1]
    name: str = "scenario"
    model: ModelSpec
    macrostates: List[Macrostate] = Field(min_length=1)
    schedules: List[DeltaSchedule] = Field(min_length=1)
    scales: List[int] = Field(min_length=1)
    convention: ShellConvention = ShellConvention()
    margins: Margins = Margins()
    tolerances: Tolerances = Tolerances()
    output_dir: Optional[str] = None
    seed: int = 0
    pairs: Optional[List[PairSpec]] = None
    bases: List[BasisName] = Field(default_factory=lambda: ["theorem1", "theorem2", "lemma4"])

    @field_validator("scales", mode="before")
    @classmethod
    def _expand_grid(cls, value):
        if isinstance(value, dict):
            return geometric_grid(int(value["start"]), int(value.get("ratio", 2)), int(value["count"]))
        return value

    @field_validator("schedules", mode="before")
    @classmethod
    def _tables_must_decrease(cls, value):
        if isinstance(value, list):
            marked = []
            for entry in value:
                if isinstance(entry, dict) and entry.get("form") == "table":
                    entry = {**entry, "require_decreasing": True}
                marked.append(entry)
            return marked
        return value

    @model_validator(mode="after")
    def _resolve(self) -> "Scenario":
        if any(scale < 1 for scale in self.scales):
            raise ValueError("scales must be positive")
        if any(later <= earlier for earlier, later in zip(self.scales, self.scales[1:])):
            raise ValueError("scale grid must be strictly increasing")
        labels = [state.label for state in self.macrostates]
        if any(not label for label in labels):
            raise ValueError("every macrostate needs a label")
        if len(set(labels)) != len(labels):
            raise ValueError("macrostate labels must be unique")
        schedule_ids = [schedule.id for schedule in self.schedules]
        if len(set(schedule_ids)) != len(schedule_ids):
            raise ValueError("schedule ids must be unique")
        for pair in self.pairs or []:
            for label in (pair.source, pair.target):
                if label not in labels:
                    raise ValueError(f"pair refers to unknown macrostate '{label}'")
            for schedule_id in (pair.schedule, pair.schedule_prime):
                if schedule_id is not None and schedule_id not in schedule_ids:
                    raise ValueError(f"pair refers to unknown schedule '{schedule_id}'")
        return self

    def macrostate(self, label: str) -> Macrostate:
        for state in self.macrostates:
            if state.label == label:
                return state
        raise KeyError(label)

    def schedule(self, schedule_id: Optional[str]) -> DeltaSchedule:
        if schedule_id is None:
            return self.schedules[0]
        for schedule in self.schedules:
            if schedule.id == schedule_id:
                return schedule
        raise KeyError(schedule_id)

    def ordered_pairs(self) -> List[PairSpec]:
        if self.pairs is not None:
            return list(self.pairs)
        labels = [state.label for state in self.macrostates]
        return [PairSpec(source=a, target=b) for a in labels for b in labels if a != b]
