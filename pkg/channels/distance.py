import math
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from channels.vectors import as_probability_vector, pad_pair
from models.channel import ImpossibilityBound
from models.errors import ValidationFailure


def trace_distance_commuting(p: Sequence[float], q: Sequence[float], tolerance: Optional[float] = None) -> float:
    """(1/2) Tr|rho - sigma| for states diagonal in a common basis"""
    p, q = pad_pair(as_probability_vector(p, tolerance), as_probability_vector(q, tolerance))
    return 0.5 * float(np.abs(p - q).sum())


def impossibility_bound(delta_s: float, scale: int) -> ImpossibilityBound:
    """1/2 (1 - exp(-X ds / 2)); a nonpositive entropy gap gives the vacuous bound 0"""
    if scale < 1:
        raise ValidationFailure(f"scale must be at least 1, got {scale}")
    if delta_s <= 0:
        return ImpossibilityBound(delta_s=delta_s, scale=scale, value=0.0, exceeds_one_third=False, vacuous=True)
    value = -0.5 * math.expm1(-scale * delta_s / 2.0)
    return ImpossibilityBound(delta_s=delta_s, scale=scale, value=value, exceeds_one_third=value > 1.0 / 3.0)


def eigenvalue_cap_check(p: Sequence[float], cap: float, tolerance: float = 1e-12) -> bool:
    """Every eigenvalue at most ``cap``; the image of a flat D-state under a unital map obeys cap 1/D"""
    if cap <= 0:
        raise ValidationFailure(f"eigenvalue cap must be positive, got {cap}")
    return bool(np.all(np.asarray(p, dtype=float) <= cap + tolerance))


def min_capped_trace_distance(dimension: int, dimension_prime: int) -> float:
    """Smallest trace distance between a flat D'-state and any state with eigenvalues <= 1/D.

    At most D'/D of the mass fits on the target support, so the distance is
    max(0, 1 - D'/D), attained by the pinched image whose support overlaps
    the target as much as possible.
    """
    if dimension < 1 or dimension_prime < 1:
        raise ValidationFailure("dimensions must be positive")
    return float(max(Fraction(0), 1 - Fraction(dimension_prime, dimension)))


def nested_flat_pair(
    dimension: int, dimension_prime: int, ambient: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Flat D- and D'-spectra on nested leading supports of a common basis of size ``ambient``"""
    n = max(dimension, dimension_prime)
    if ambient is not None:
        if ambient < n:
            raise ValidationFailure(f"ambient dimension {ambient} is smaller than the flat supports ({n})")
        n = ambient
    p = np.zeros(n)
    q = np.zeros(n)
    p[:dimension] = 1.0 / dimension
    q[:dimension_prime] = 1.0 / dimension_prime
    return p, q


def finite_entropy_gap(dimension: int, dimension_prime: int, scale: int) -> float:
    """ds = (ln D - ln D') / X from exact counts"""
    return (math.log(dimension) - math.log(dimension_prime)) / scale
