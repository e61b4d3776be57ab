from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from config.model_families import load_model_families
from models.errors import ArityMismatchError, EmptySiteTableError, UnknownFamilyError, ValidationFailure
from models.system import ModelSpec, ModelSystem

ModelLike = Union[str, Mapping[str, Any], ModelSpec, ModelSystem]


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationFailure(f"{where} must be an integer, got {value!r}")
    return value


def _family_table(family: str, entry: Dict[str, Any], params: Dict[str, Any]) -> List[List[int]]:
    if entry.get("generator") == "quanta":
        q_max = _integer(params.get("q_max"), f"{family} parameter q_max")
        if q_max < 1:
            raise ValidationFailure(f"{family} parameter q_max must be at least 1")
        return [[q] for q in range(q_max + 1)]

    table = []
    for raw in entry.get("site_table", []):
        row = []
        for value in raw:
            # strings in a family table name one of its parameters
            if isinstance(value, str):
                value = _integer(params.get(value), f"{family} parameter {value}")
            row.append(value)
        table.append(row)
    return table


def _merge_duplicates(
    table: List[List[int]], multiplicities: Optional[List[int]]
) -> Tuple[List[Tuple[int, ...]], List[int]]:
    if multiplicities is None:
        multiplicities = [1] * len(table)
    if len(multiplicities) != len(table):
        raise ValidationFailure("one multiplicity per site tuple is required")
    merged: Dict[Tuple[int, ...], int] = {}
    for row, weight in zip(table, multiplicities):
        weight = _integer(weight, "site multiplicity")
        if weight < 1:
            raise ValidationFailure("site multiplicities must be positive")
        key = tuple(row)
        merged[key] = merged.get(key, 0) + weight
    return list(merged.keys()), list(merged.values())


def build_model(spec: ModelLike, families: Optional[Dict[str, Any]] = None) -> ModelSystem:
    """Build a validated ModelSystem from a family name, a mapping or a ModelSpec.

    Built-in families come from config/model_families.json; a spec with a raw
    ``site_table`` bypasses the registry.
    """
    if isinstance(spec, ModelSystem):
        return spec
    if not isinstance(spec, ModelSpec):
        spec = ModelSpec.model_validate(spec)

    if spec.site_table is not None:
        table = [list(row) for row in spec.site_table]
        if not table:
            raise EmptySiteTableError()
        num_observables = len(table[0])
        name = spec.name or "custom"
    elif spec.family is not None:
        registry = families if families is not None else load_model_families()
        if spec.family not in registry:
            raise UnknownFamilyError(spec.family)
        entry = registry[spec.family]
        known = entry.get("parameters", {})
        unknown = sorted(set(spec.parameters) - set(known))
        if unknown:
            raise ValidationFailure(f"unknown parameter '{unknown[0]}' for model family '{spec.family}'")
        params = {**known, **spec.parameters}
        table = _family_table(spec.family, entry, params)
        if not table:
            raise EmptySiteTableError()
        num_observables = entry["num_observables"]
        name = spec.name or spec.family
    else:
        raise ValidationFailure("model spec needs a family name or a site table")

    for row in table:
        if len(row) != num_observables:
            raise ArityMismatchError(
                f"site tuple {tuple(row)} has {len(row)} entries, expected {num_observables}"
            )
        for value in row:
            _integer(value, "site eigenvalue")

    site_table, multiplicities = _merge_duplicates(table, spec.multiplicities)
    if len(site_table) < 2:
        raise ValidationFailure("at least two distinct per-site tuples are required")

    fields: Dict[str, Any] = {
        "name": name,
        "num_observables": num_observables,
        "site_table": tuple(site_table),
        "multiplicities": tuple(multiplicities),
        "sites_per_scale": spec.sites_per_scale,
    }
    if spec.value_unit is not None:
        if len(spec.value_unit) != num_observables:
            raise ArityMismatchError(
                f"{len(spec.value_unit)} value units given for {num_observables} observables"
            )
        fields["value_unit"] = tuple(spec.value_unit)
    return ModelSystem(**fields)
