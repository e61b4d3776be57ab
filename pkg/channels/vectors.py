from typing import Optional, Sequence, Tuple

import numpy as np

from config.defaults import get_defaults
from models.errors import ValidationFailure


def as_probability_vector(values: Sequence[float], tolerance: Optional[float] = None) -> np.ndarray:
    """Validate a spectrum: 1D, finite, nonnegative, summing to 1 within tolerance"""
    if tolerance is None:
        tolerance = get_defaults()["normalization_tolerance"]
    vector = np.asarray(values, dtype=float)
    if vector.ndim != 1 or vector.size == 0:
        raise ValidationFailure(f"probability vector must be 1D and nonempty, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise ValidationFailure("probability vector has non-finite entries")
    if np.any(vector < 0):
        raise ValidationFailure("probability vector has negative entries")
    total = float(vector.sum())
    if abs(total - 1.0) > tolerance:
        raise ValidationFailure(f"probability vector sums to {total!r}, not 1")
    return vector


def pad_pair(p: np.ndarray, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Zero-pad the shorter vector"""
    n = max(len(p), len(q))
    return np.pad(p, (0, n - len(p))), np.pad(q, (0, n - len(q)))
