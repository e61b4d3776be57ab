from typing import List, Optional, Tuple

import numpy as np

from accessibility.majorization import majorizes
from channels.distance import nested_flat_pair, trace_distance_commuting
from channels.pinching import pinch_spectrum
from channels.t_transform import apply_map
from models.channel import DoublyStochasticMap, PinchingMap


def random_probability_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    vector = rng.dirichlet(np.ones(n))
    return vector / vector.sum()


def random_doubly_stochastic(
    n: int, rng: np.random.Generator, terms: Optional[int] = None, tolerance: float = 1e-12
) -> DoublyStochasticMap:
    """Convex mixture of random permutation matrices (Birkhoff)"""
    terms = n if terms is None else terms
    weights = rng.dirichlet(np.ones(terms))
    matrix = np.zeros((n, n))
    for weight in weights:
        matrix[np.arange(n), rng.permutation(n)] += weight
    return DoublyStochasticMap.from_matrix(matrix, tolerance=tolerance)


def majorized_pair(n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """(p, Tp) for random p and a random doubly stochastic T"""
    p = random_probability_vector(n, rng)
    q = apply_map(random_doubly_stochastic(n, rng), p)
    return p, q / q.sum()


def non_majorized_pair(n: int, rng: np.random.Generator, attempts: int = 10000) -> Tuple[np.ndarray, np.ndarray]:
    """Rejection-sample (p, q) with p not majorizing q"""
    for _ in range(attempts):
        p = random_probability_vector(n, rng)
        q = random_probability_vector(n, rng)
        if not majorizes(p, q):
            return p, q
    raise RuntimeError(f"no non-majorized pair of length {n} found in {attempts} draws")


def random_image_distances(
    dimension: int,
    dimension_prime: int,
    rng: np.random.Generator,
    maps: int = 8,
    terms: Optional[int] = None,
    map_tolerance: float = 1e-12,
) -> List[float]:
    """Trace distances from the flat D'-state to unital images of the flat D-state.

    Both flat states sit on nested leading supports of a basis twice the size
    of the larger one, so images can spread past the source support. The
    first image is the source state itself. Every image is pinched onto the
    target support before the distance is taken.
    """
    p, q = nested_flat_pair(dimension, dimension_prime, 2 * max(dimension, dimension_prime))
    pinching = PinchingMap.leading(dimension_prime, len(p))
    images = [p] + [
        apply_map(random_doubly_stochastic(len(p), rng, terms, map_tolerance), p) for _ in range(maps)
    ]
    return [trace_distance_commuting(pinch_spectrum(pinching, image).weights, q) for image in images]
