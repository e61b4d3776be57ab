from bisect import bisect_right
from itertools import accumulate
from typing import Any, Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from models.rational import ExactRational

Eigenvalues = Tuple[int, ...]


class ModelSystem(BaseModel):
    """A scale-indexed family of commuting integer-valued observables on independent sites.

    Observable 0 is the energy. At scale X the system has
    ``sites_per_scale * X`` sites, each contributing one tuple of ``site_table``
    (with degeneracy ``multiplicities[j]``).

    The site count is restricted to a fixed integer multiple of X rather than
    an arbitrary increasing map X -> sites. Every bundled family uses the
    multiple 1, and any positive multiple keeps the count strictly increasing.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    num_observables: int = Field(ge=1)
    site_table: Tuple[Eigenvalues, ...]
    multiplicities: Tuple[int, ...] = ()
    sites_per_scale: int = Field(default=1, ge=1)
    value_unit: Tuple[ExactRational, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data):
        if isinstance(data, dict):
            data = dict(data)
            table = data.get("site_table") or ()
            if not data.get("multiplicities"):
                data["multiplicities"] = tuple(1 for _ in table)
            if not data.get("value_unit") and "num_observables" in data:
                data["value_unit"] = tuple(1 for _ in range(data["num_observables"]))
        return data

    @model_validator(mode="after")
    def _check_invariants(self) -> "ModelSystem":
        if not self.site_table:
            raise ValueError("empty site table")
        for values in self.site_table:
            if len(values) != self.num_observables:
                raise ValueError(
                    f"site tuple {values} has {len(values)} entries, expected {self.num_observables}"
                )
        if len(set(self.site_table)) < 2:
            raise ValueError("at least two distinct per-site tuples are required")
        if len(self.multiplicities) != len(self.site_table):
            raise ValueError("one multiplicity per site tuple is required")
        if any(m < 1 for m in self.multiplicities):
            raise ValueError("site multiplicities must be positive")
        if len(self.value_unit) != self.num_observables:
            raise ValueError("one value unit per observable is required")
        if any(unit <= 0 for unit in self.value_unit):
            raise ValueError("value units must be positive")
        return self

    @property
    def num_alternatives(self) -> int:
        """Dimension of the single-site Hilbert space"""
        return sum(self.multiplicities)

    def sites_at(self, scale: int) -> int:
        return self.sites_per_scale * scale

    def total_dimension(self, scale: int) -> int:
        return self.num_alternatives ** self.sites_at(scale)


class JointSpectrum(BaseModel):
    """Joint eigenvalue tuples with exact multiplicities at a fixed scale.

    ``value_unit`` converts the integer eigenvalues to physical units; all
    threshold comparisons are done on the integers after dividing the
    threshold by the unit.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scale: int = Field(ge=1)
    num_observables: int = Field(ge=1)
    entries: Tuple[Tuple[Eigenvalues, int], ...]
    total_dimension: int
    value_unit: Tuple[ExactRational, ...] = ()

    _prefix: Optional[Tuple[List[int], List[int]]] = PrivateAttr(default=None)
    _values: Dict[int, List[int]] = PrivateAttr(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def _unit_defaults(cls, data):
        if isinstance(data, dict) and not data.get("value_unit") and "num_observables" in data:
            data = dict(data)
            data["value_unit"] = tuple(1 for _ in range(data["num_observables"]))
        return data

    @model_validator(mode="after")
    def _check_invariants(self) -> "JointSpectrum":
        previous = None
        running = 0
        for values, multiplicity in self.entries:
            if len(values) != self.num_observables:
                raise ValueError(f"eigenvalue tuple {values} has the wrong arity")
            if multiplicity < 0:
                raise ValueError("multiplicities must be nonnegative")
            if previous is not None and values <= previous:
                raise ValueError("entries must be sorted with no duplicate tuples")
            previous = values
            running += multiplicity
        if running != self.total_dimension:
            raise ValueError(f"multiplicities sum to {running}, expected {self.total_dimension}")
        return self

    def iter_entries(self) -> Iterator[Tuple[Eigenvalues, int]]:
        return iter(self.entries)

    def as_dict(self) -> Dict[Eigenvalues, int]:
        return dict(self.entries)

    def distinct_values(self, observable: int) -> List[int]:
        """Sorted distinct eigenvalues of one observable"""
        if observable not in self._values:
            self._values[observable] = sorted({values[observable] for values, _ in self.entries})
        return self._values[observable]

    def cumulative_single(self) -> Tuple[List[int], List[int]]:
        """Eigenvalues and running multiplicity totals, single-observable spectra only"""
        if self.num_observables != 1:
            raise ValueError("cumulative table is only defined for one observable")
        if self._prefix is None:
            values = [tup[0] for tup, _ in self.entries]
            totals = list(accumulate(mult for _, mult in self.entries))
            self._prefix = (values, totals)
        return self._prefix

    def count_at_most(self, bound: int) -> int:
        """Multiplicity of eigenvalues <= bound (single observable)"""
        values, totals = self.cumulative_single()
        position = bisect_right(values, bound)
        return totals[position - 1] if position else 0


class ModelSpec(BaseModel):
    """Declarative model description: a built-in family with parameters, or a raw site table"""

    family: Optional[str] = None
    name: Optional[str] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    site_table: Optional[List[List[int]]] = None
    multiplicities: Optional[List[int]] = None
    sites_per_scale: int = Field(default=1, ge=1)
    value_unit: Optional[List[ExactRational]] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @model_validator(mode="before")
    @classmethod
    def _from_name(cls, data):
        if isinstance(data, str):
            return {"family": data}
        return data
