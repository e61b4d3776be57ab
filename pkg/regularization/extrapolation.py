import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from models.errors import InsufficientPointsError, ValidationFailure
from models.schedule import EntropySequence, LimitEstimate

METHODS = ("last-point", "richardson", "affine-fit", "schedule-fit")

# rank test on unit-norm columns; exact collinearity after float rounding sits far below this
RANK_TOLERANCE = 1e-9


class FitResult(NamedTuple):
    value: float
    error: float
    fitted: np.ndarray
    columns: Tuple[str, ...]


def _require(points: int, needed: int, method: str):
    if points < needed:
        raise InsufficientPointsError(f"method '{method}' needs at least {needed} points, got {points}")


def richardson_table(scales: Sequence[int], values: Sequence[float]) -> List[List[float]]:
    """Neville table for an expansion in powers of 1/X; level m combines X_i and X_{i+m}"""
    levels = [list(map(float, values))]
    for m in range(1, len(values)):
        previous = levels[-1]
        current = []
        for i in range(len(previous) - 1):
            ratio = scales[i + m] / scales[i]
            current.append((ratio * previous[i + 1] - previous[i]) / (ratio - 1.0))
        levels.append(current)
    return levels


def _solve(columns: List[np.ndarray], y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    design = np.column_stack(columns)
    coefficients, *_ = np.linalg.lstsq(design, y, rcond=None)
    return design, coefficients


def _intercept_stderr(design: np.ndarray, y: np.ndarray, coefficients: np.ndarray) -> float:
    n, k = design.shape
    residual = y - design @ coefficients
    sigma2 = float(residual @ residual) / (n - k)
    covariance = sigma2 * np.linalg.pinv(design.T @ design)
    return math.sqrt(max(float(covariance[0, 0]), 0.0))


def affine_fit(scales: Sequence[int], values: Sequence[float]) -> FitResult:
    """Regress s_X on 1, (ln X)/X and 1/X; the intercept estimates the limit"""
    x = np.asarray(scales, dtype=float)
    y = np.asarray(values, dtype=float)
    n = len(x)
    _require(n, 2, "affine-fit")
    ones, log_term, inverse = np.ones(n), np.log(x) / x, 1.0 / x

    if n == 2:
        design, coefficients = _solve([ones, inverse], y)
        value = float(coefficients[0])
        return FitResult(value, abs(value - y[-1]), design @ coefficients, ("1", "1/X"))

    design, coefficients = _solve([ones, log_term, inverse], y)
    value = float(coefficients[0])
    if n == 3:
        _, reduced = _solve([ones, inverse], y)
        error = abs(value - float(reduced[0]))
    else:
        error = _intercept_stderr(design, y, coefficients)
    return FitResult(value, error, design @ coefficients, ("1", "lnX/X", "1/X"))


def schedule_fit(
    scales: Sequence[int], values: Sequence[float], deltas: Optional[Sequence[float]] = None
) -> FitResult:
    """Regress s_X on {1, delta, delta^2, (ln X)/X, 1/X}.

    Columns are taken in that order and skipped when they add no rank (for
    example a constant delta, or delta^2 = 1/X for delta = X^(-1/2)). At most
    n - 1 columns are used once there are three or more points.
    """
    x = np.asarray(scales, dtype=float)
    y = np.asarray(values, dtype=float)
    n = len(x)
    _require(n, 2, "schedule-fit")

    candidates = [("1", np.ones(n))]
    if deltas is not None:
        d = np.asarray(deltas, dtype=float)
        candidates += [("delta", d), ("delta^2", d * d)]
    candidates += [("lnX/X", np.log(x) / x), ("1/X", 1.0 / x)]

    limit = n - 1 if n >= 3 else n
    names, columns = [], []
    for name, column in candidates:
        if len(columns) == limit:
            break
        trial = columns + [column]
        normalized = np.column_stack([c / np.linalg.norm(c) for c in trial])
        if np.linalg.matrix_rank(normalized, tol=RANK_TOLERANCE) == len(trial):
            names.append(name)
            columns = trial

    design, coefficients = _solve(columns, y)
    value = float(coefficients[0])
    if n > len(columns):
        error = _intercept_stderr(design, y, coefficients)
    else:
        error = abs(value - y[-1])
    return FitResult(value, error, design @ coefficients, tuple(names))


def _deltas(seq: EntropySequence) -> Optional[List[float]]:
    if seq.tag != "shell" or any(point.delta is None for point in seq.points):
        return None
    return [float(point.delta) for point in seq.points]


def estimate_limit(seq: EntropySequence, method: str = "affine-fit") -> LimitEstimate:
    """Finite-size estimate of lim s_X with the declared method's residual as error bar.

    last-point  the final s_X; error |s_last - s_prev|
    richardson  full Neville table in 1/X; error between the top two levels
    affine-fit  intercept of s_X ~ 1 + (ln X)/X + 1/X
    schedule-fit intercept with delta_X columns added (shell sequences)
    """
    if method not in METHODS:
        raise ValidationFailure(f"unknown extrapolation method '{method}'; choose one of {', '.join(METHODS)}")
    scales, values = seq.scales, seq.densities
    window = tuple(scales)

    if method == "last-point":
        _require(len(values), 1, method)
        error = abs(values[-1] - values[-2]) if len(values) > 1 else 0.0
        return LimitEstimate(value=values[-1], error_bar=error, method=method, tail_window=window)

    if method == "richardson":
        _require(len(values), 2, method)
        table = richardson_table(scales, values)
        value = table[-1][0]
        error = abs(value - table[-2][-1])
        return LimitEstimate(value=value, error_bar=error, method=method, tail_window=window)

    if method == "affine-fit":
        fit = affine_fit(scales, values)
    else:
        fit = schedule_fit(scales, values, _deltas(seq))
    return LimitEstimate(
        value=fit.value,
        error_bar=fit.error,
        method=method,
        tail_window=window,
        note="columns: " + ", ".join(fit.columns),
    )
