from fractions import Fraction
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.rational import ExactRational, to_fraction


class Macrostate(BaseModel):
    """Density vector a = (a^0, ..., a^L); a^0 is the energy density."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    densities: Tuple[ExactRational, ...]
    label: Optional[str] = None

    @field_validator("densities", mode="before")
    @classmethod
    def _accept_scalar(cls, value):
        if isinstance(value, (int, float, str, Fraction)):
            return (value,)
        return value

    @model_validator(mode="after")
    def _non_empty(self) -> "Macrostate":
        if not self.densities:
            raise ValueError("a macrostate needs at least one density")
        return self

    @classmethod
    def coerce(cls, value) -> "Macrostate":
        """Accept a Macrostate, a bare density sequence or a single number"""
        if isinstance(value, Macrostate):
            return value
        if isinstance(value, dict):
            return cls.model_validate(value)
        return cls(densities=value)

    @property
    def num_observables(self) -> int:
        return len(self.densities)

    def scaled(self, factor) -> "Macrostate":
        """Component-wise a * factor, the a(1 +/- delta) family used for downward sets"""
        factor = to_fraction(factor)
        return Macrostate(densities=tuple(d * factor for d in self.densities), label=self.label)

    def shifted(self, offset) -> "Macrostate":
        offset = to_fraction(offset)
        return Macrostate(densities=tuple(d + offset for d in self.densities), label=self.label)

    def bumped(self, component: int, amount) -> "Macrostate":
        amount = to_fraction(amount)
        densities = list(self.densities)
        densities[component] += amount
        return Macrostate(densities=tuple(densities), label=self.label)

    def as_floats(self) -> Tuple[float, ...]:
        return tuple(float(d) for d in self.densities)

    def describe(self) -> str:
        if self.label:
            return self.label
        return "(" + ",".join(format(float(d), "g") for d in self.densities) + ")"


class ShellConvention(BaseModel):
    """How shell windows scale with delta.

    Shells are always half-open [lo, hi) and downward sets always closed
    (lambda <= t); only the window arithmetic changes with ``mode``.
    """

    model_config = ConfigDict(frozen=True)

    mode: Literal["multiplicative", "additive"] = "multiplicative"

    @model_validator(mode="before")
    @classmethod
    def _from_flag(cls, data):
        if isinstance(data, str):
            data = {"mode": data}
        if isinstance(data, dict) and data.get("mode") in ("mult", "add"):
            data = dict(data)
            data["mode"] = "multiplicative" if data["mode"] == "mult" else "additive"
        return data

    @property
    def shell_boundary(self) -> str:
        return "half-open"

    @property
    def downward_boundary(self) -> str:
        return "closed"

    def window(self, density: Fraction, delta: Fraction, scale: int) -> Tuple[Fraction, Fraction]:
        if self.mode == "additive":
            return scale * (density - delta), scale * (density + delta)
        ends = (scale * density * (1 - delta), scale * density * (1 + delta))
        return min(ends), max(ends)

    def describe(self) -> str:
        return f"{self.mode}; shells [lo, hi); downward lambda <= t"


class ShellSupport(BaseModel):
    """Which shell a flat state lives on"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    macrostate: Macrostate
    delta: ExactRational
    scale: int = Field(ge=1)
    convention: ShellConvention = ShellConvention()


class FlatState(BaseModel):
    """Maximally mixed state on a D-dimensional subspace: D eigenvalues 1/D, the rest 0."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int = Field(ge=1)
    ambient_dimension: int = Field(ge=1)
    support: Optional[ShellSupport] = None

    @model_validator(mode="after")
    def _fits(self) -> "FlatState":
        if self.dimension > self.ambient_dimension:
            raise ValueError(
                f"flat state dimension {self.dimension} exceeds ambient dimension {self.ambient_dimension}"
            )
        return self

    @property
    def eigenvalue(self) -> Fraction:
        return Fraction(1, self.dimension)

    def probabilities(self, length: Optional[int] = None) -> np.ndarray:
        """Explicit spectrum padded with zeros; only sensible for small dimensions"""
        if length is None:
            length = self.ambient_dimension
        if length < self.dimension:
            raise ValueError(f"cannot lay out {self.dimension} eigenvalues in length {length}")
        vector = np.zeros(length)
        vector[: self.dimension] = 1.0 / self.dimension
        return vector
