from typing import List, Optional, Sequence, Tuple

import numpy as np

from channels.vectors import as_probability_vector
from config.defaults import get_defaults
from models.errors import ValidationFailure

# (eigenvalue, how many times it occurs)
Block = Tuple[float, int]


def blocks_of(vector: np.ndarray) -> List[Block]:
    values, counts = np.unique(vector[vector > 0], return_counts=True)
    return [(float(v), int(c)) for v, c in zip(values[::-1], counts[::-1])]


def flat_blocks(dimension: int) -> List[Block]:
    return [(1.0 / dimension, dimension)]


def _partial_sum_curve(blocks: Sequence[Block]) -> Tuple[np.ndarray, np.ndarray]:
    ordered = sorted(blocks, key=lambda block: -block[0])
    counts = np.array([0] + [count for _, count in ordered], dtype=float)
    masses = np.array([0.0] + [value * count for value, count in ordered])
    return np.cumsum(counts), np.cumsum(masses)


def majorizes_blocks(p: Sequence[Block], q: Sequence[Block], tolerance: Optional[float] = None) -> bool:
    """Majorization on run-length spectra.

    Partial sums of a decreasing spectrum are piecewise linear with kinks at
    block ends, so comparing both curves at the union of kinks decides the
    relation without expanding the vectors.
    """
    if tolerance is None:
        tolerance = get_defaults()["normalization_tolerance"]
    p_positions, p_sums = _partial_sum_curve(p)
    q_positions, q_sums = _partial_sum_curve(q)
    positions = np.union1d(p_positions, q_positions)
    p_curve = np.interp(positions, p_positions, p_sums)
    q_curve = np.interp(positions, q_positions, q_sums)
    return bool(np.all(p_curve >= q_curve - tolerance))


def majorizes(p: Sequence[float], q: Sequence[float], tolerance: Optional[float] = None) -> bool:
    """True iff the m largest entries of p sum to at least those of q, for every m"""
    p = as_probability_vector(p, tolerance)
    q = as_probability_vector(q, tolerance)
    return majorizes_blocks(blocks_of(p), blocks_of(q), tolerance)


def flat_convertible_at_scale(dimension: int, dimension_prime: int) -> bool:
    """A flat D-state majorizes a flat D'-state exactly when D <= D'"""
    for value in (dimension, dimension_prime):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ValidationFailure(f"flat state dimensions must be positive integers, got {value!r}")
    return dimension <= dimension_prime
