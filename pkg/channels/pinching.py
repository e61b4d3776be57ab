from typing import Optional, Sequence

from channels.vectors import as_probability_vector
from models.channel import PinchedSpectrum, PinchingMap
from models.errors import ValidationFailure


def pinch_spectrum(P: PinchingMap, p: Sequence[float], tolerance: Optional[float] = None) -> PinchedSpectrum:
    """Apply P rho P + (1-P) rho (1-P) to a state diagonal in the pinching basis.

    Diagonal weights pass through unchanged; each is tagged by membership in
    the projector's support and the in-support mass is reported.
    """
    p = as_probability_vector(p, tolerance)
    if len(p) != P.ambient_dimension:
        raise ValidationFailure(
            f"pinching acts on dimension {P.ambient_dimension}, vector has {len(p)} entries"
        )
    members = set(P.support)
    tags = tuple(index in members for index in range(len(p)))
    inside = float(sum(weight for weight, tag in zip(p, tags) if tag))
    return PinchedSpectrum(
        weights=tuple(float(w) for w in p),
        in_support=tags,
        in_support_weight=inside,
        out_of_support_weight=float(p.sum()) - inside,
    )
