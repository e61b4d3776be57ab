from typing import Optional, Sequence

import numpy as np

from accessibility.majorization import majorizes
from channels.vectors import as_probability_vector, pad_pair
from config.defaults import get_defaults
from models.channel import DoublyStochasticMap, TTransform
from models.errors import NotMajorizedError, ValidationFailure, WitnessFailure

# discrepancies below this are rounding residue, not something a T-transform should fix
STEP_TOLERANCE = 1e-14


def _t_matrix(n: int, step: TTransform) -> np.ndarray:
    matrix = np.eye(n)
    matrix[step.i, step.i] = matrix[step.j, step.j] = step.t
    matrix[step.i, step.j] = matrix[step.j, step.i] = 1.0 - step.t
    return matrix


def expand_map(T: DoublyStochasticMap) -> np.ndarray:
    """Explicit matrix of a map; chains are expanded through their sorting permutations"""
    if T.representation == "matrix":
        return np.asarray(T.matrix, dtype=float)
    n = T.size
    chain = np.eye(n)
    for step in T.transforms:
        chain = _t_matrix(n, step) @ chain
    gather = np.zeros((n, n))
    gather[np.arange(n), list(T.input_order)] = 1.0
    scatter = np.zeros((n, n))
    scatter[list(T.output_order), np.arange(n)] = 1.0
    full = scatter @ chain @ gather
    # validates rows, columns and entry range
    DoublyStochasticMap.from_matrix(full, tolerance=T.tolerance)
    return full


def apply_map(
    T: DoublyStochasticMap, p: Sequence[float], tolerance: Optional[float] = None, check: bool = True
) -> np.ndarray:
    """Tp, checked to be normalized and majorized by p"""
    p = as_probability_vector(p, tolerance)
    if len(p) != T.size:
        raise ValidationFailure(f"map acts on dimension {T.size}, vector has {len(p)} entries")

    if T.representation == "matrix":
        out = np.asarray(T.matrix, dtype=float) @ p
    else:
        y = p[list(T.input_order)].copy()
        for step in T.transforms:
            a, b = y[step.i], y[step.j]
            y[step.i] = step.t * a + (1.0 - step.t) * b
            y[step.j] = (1.0 - step.t) * a + step.t * b
        out = np.empty(T.size)
        out[list(T.output_order)] = y
    out = np.maximum(out, 0.0)

    if check:
        if tolerance is None:
            tolerance = get_defaults()["normalization_tolerance"]
        if abs(float(out.sum()) - 1.0) > tolerance:
            raise WitnessFailure(f"map output sums to {float(out.sum())!r}")
        if not majorizes(p, out, tolerance):
            raise WitnessFailure("map output is not majorized by its input")
    return out


def t_transform_chain(
    p: Sequence[float],
    q: Sequence[float],
    cap: Optional[int] = None,
    witness_tolerance: Optional[float] = None,
    map_tolerance: Optional[float] = None,
    normalization_tolerance: Optional[float] = None,
) -> DoublyStochasticMap:
    """Chain of at most n-1 T-transforms carrying p to q (requires p to majorize q).

    Works on the decreasingly sorted vectors: repeatedly take the largest
    index j with x_j > y_j and the smallest k > j with x_k < y_k, and move
    min(x_j - y_j, y_k - x_k) from j to k. Each step closes one coordinate.
    """
    defaults = get_defaults()
    cap = defaults["chain_cap"] if cap is None else cap
    witness_tolerance = defaults["witness_tolerance"] if witness_tolerance is None else witness_tolerance
    map_tolerance = defaults["map_tolerance"] if map_tolerance is None else map_tolerance

    p = as_probability_vector(p, normalization_tolerance)
    q = as_probability_vector(q, normalization_tolerance)
    p, q = pad_pair(p, q)
    n = len(p)
    if n > cap:
        raise ValidationFailure(f"vector length {n} exceeds the chain cap {cap}")
    if not majorizes(p, q):
        raise NotMajorizedError("p does not majorize q, so no doubly stochastic witness exists")

    input_order = np.argsort(-p, kind="stable")
    output_order = np.argsort(-q, kind="stable")
    x = p[input_order].copy()
    y = q[output_order]

    transforms = []
    for _ in range(n - 1):
        above = np.nonzero(x - y > STEP_TOLERANCE)[0]
        if not above.size:
            break
        j = int(above[-1])
        below = np.nonzero(x[j + 1:] < y[j + 1:] - STEP_TOLERANCE)[0]
        if not below.size:
            break
        k = j + 1 + int(below[0])
        excess, deficit = x[j] - y[j], y[k] - x[k]
        moved = min(excess, deficit)
        t = min(1.0, max(0.0, 1.0 - moved / (x[j] - x[k])))
        transforms.append(TTransform(i=j, j=k, t=t))
        if excess <= deficit:
            x[j], x[k] = y[j], x[k] + moved
        else:
            x[j], x[k] = x[j] - moved, y[k]

    witness = DoublyStochasticMap(
        size=n,
        representation="composition",
        transforms=tuple(transforms),
        input_order=tuple(int(i) for i in input_order),
        output_order=tuple(int(i) for i in output_order),
        tolerance=map_tolerance,
    )
    image = apply_map(witness, p, check=False)
    error = float(np.abs(image - q).sum())
    if error > witness_tolerance:
        raise WitnessFailure(f"T-transform chain misses the target by {error:.3e} in l1")
    return witness
