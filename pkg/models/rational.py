from fractions import Fraction
from typing import Annotated, Any, Union

from pydantic import BeforeValidator, PlainSerializer


def to_fraction(value: Any) -> Fraction:
    """Convert user-facing numbers to exact rationals.

    Floats go through their shortest decimal repr so that 0.3 becomes 3/10,
    which keeps thresholds such as X * a reproducible by hand.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot interpret {value!r} as a rational number")


def fraction_to_str(value: Fraction) -> str:
    return str(value)


ExactRational = Annotated[
    Fraction,
    BeforeValidator(to_fraction),
    PlainSerializer(fraction_to_str, return_type=str, when_used="json"),
]


def extended_to_json(value: Union[Fraction, float]) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(value)


def to_extended(value: Any) -> Union[Fraction, float]:
    """Exact rational, or +/- infinity for the bounds of an empty set"""
    if isinstance(value, float) and value in (float("inf"), float("-inf")):
        return value
    if isinstance(value, str) and value.strip() in ("inf", "-inf"):
        return float(value)
    return to_fraction(value)


ExtendedRational = Annotated[
    Union[float, Fraction],
    BeforeValidator(to_extended),
    PlainSerializer(extended_to_json, return_type=str, when_used="json"),
]
