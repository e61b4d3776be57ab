from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class TTransform(BaseModel):
    """Mixes coordinates i < j: x_i' = t x_i + (1-t) x_j, x_j' = (1-t) x_i + t x_j"""

    model_config = ConfigDict(frozen=True)

    i: int = Field(ge=0)
    j: int = Field(ge=0)
    t: float = Field(ge=0.0, le=1.0)

    def as_list(self) -> List[float]:
        return [self.i, self.j, self.t]


class DoublyStochasticMap(BaseModel):
    """Either an explicit n x n matrix or a chain of T-transforms.

    The chain acts on decreasingly sorted coordinates: the input is read in
    ``input_order``, the transforms are applied in sequence and the result is
    written back in ``output_order``.
    """

    model_config = ConfigDict(frozen=True)

    size: int = Field(ge=1)
    representation: Literal["matrix", "composition"]
    matrix: Optional[Tuple[Tuple[float, ...], ...]] = None
    transforms: Tuple[TTransform, ...] = ()
    input_order: Tuple[int, ...] = ()
    output_order: Tuple[int, ...] = ()
    tolerance: float = 1e-12

    @model_validator(mode="after")
    def _check(self) -> "DoublyStochasticMap":
        n = self.size
        if self.representation == "matrix":
            if self.matrix is None:
                raise ValueError("matrix representation needs a matrix")
            array = np.asarray(self.matrix, dtype=float)
            if array.shape != (n, n):
                raise ValueError(f"matrix has shape {array.shape}, expected ({n}, {n})")
            if np.any(array < -self.tolerance) or np.any(array > 1 + self.tolerance):
                raise ValueError("matrix entries must lie in [0, 1]")
            if not np.allclose(array.sum(axis=0), 1.0, rtol=0.0, atol=self.tolerance):
                raise ValueError("matrix columns must sum to 1")
            if not np.allclose(array.sum(axis=1), 1.0, rtol=0.0, atol=self.tolerance):
                raise ValueError("matrix rows must sum to 1")
        else:
            identity = tuple(range(n))
            if not self.input_order:
                object.__setattr__(self, "input_order", identity)
            if not self.output_order:
                object.__setattr__(self, "output_order", identity)
            for order in (self.input_order, self.output_order):
                if sorted(order) != list(identity):
                    raise ValueError("sorting orders must be permutations of range(size)")
            for step in self.transforms:
                if not step.i < step.j < n:
                    raise ValueError(f"T-transform indices ({step.i}, {step.j}) out of range for size {n}")
        return self

    @classmethod
    def identity(cls, size: int) -> "DoublyStochasticMap":
        return cls(size=size, representation="composition")

    @classmethod
    def from_matrix(cls, matrix, tolerance: float = 1e-12) -> "DoublyStochasticMap":
        array = np.asarray(matrix, dtype=float)
        return cls(
            size=array.shape[0],
            representation="matrix",
            matrix=tuple(tuple(float(x) for x in row) for row in array),
            tolerance=tolerance,
        )

    def composition_list(self) -> List[List[float]]:
        return [step.as_list() for step in self.transforms]


class PinchingMap(BaseModel):
    """P rho P + (1-P) rho (1-P) for the projector onto ``support`` within an ambient basis"""

    model_config = ConfigDict(frozen=True)

    support: Tuple[int, ...]
    ambient_dimension: int = Field(ge=1)

    @model_validator(mode="after")
    def _check(self) -> "PinchingMap":
        if not self.support:
            raise ValueError("pinching support must be nonempty")
        if len(set(self.support)) != len(self.support):
            raise ValueError("pinching support has repeated indices")
        if len(self.support) > self.ambient_dimension:
            raise ValueError("pinching support larger than the ambient space")
        if min(self.support) < 0 or max(self.support) >= self.ambient_dimension:
            raise ValueError("pinching support index outside the ambient basis")
        object.__setattr__(self, "support", tuple(sorted(self.support)))
        return self

    @classmethod
    def leading(cls, dimension: int, ambient_dimension: int) -> "PinchingMap":
        return cls(support=tuple(range(dimension)), ambient_dimension=ambient_dimension)


class PinchedSpectrum(BaseModel):
    model_config = ConfigDict(frozen=True)

    weights: Tuple[float, ...]
    in_support: Tuple[bool, ...]
    in_support_weight: float
    out_of_support_weight: float


class ImpossibilityBound(BaseModel):
    """Lower bound 1/2 (1 - exp(-X ds / 2)) on the trace distance to the target shell"""

    model_config = ConfigDict(frozen=True)

    delta_s: float
    scale: int
    value: float
    exceeds_one_third: bool
    vacuous: bool = False
