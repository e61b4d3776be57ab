import math
from typing import Optional

from microcanonical.counting import shell_dimension
from models.errors import EmptyShellError, ValidationFailure
from models.macrostate import FlatState, Macrostate, ShellConvention, ShellSupport
from models.rational import to_fraction
from spectra.convolution import SpectrumLike


def boltzmann_entropy(dimension: int) -> float:
    """Natural log of an exact dimension count"""
    if isinstance(dimension, bool) or not isinstance(dimension, int):
        raise ValidationFailure(f"dimension must be an integer, got {dimension!r}")
    if dimension < 1:
        raise EmptyShellError()
    return math.log(dimension)


def microcanonical_state(
    spectrum: SpectrumLike, a, delta, scale: int, convention: Optional[ShellConvention] = None
) -> FlatState:
    """Flat state on the shell around X a"""
    a = Macrostate.coerce(a)
    convention = convention or ShellConvention()
    dimension = shell_dimension(spectrum, a, delta, scale, convention)
    if dimension == 0:
        raise EmptyShellError(f"no joint eigenvalue in the shell around {a.describe()} at X={scale}")
    return FlatState(
        dimension=dimension,
        ambient_dimension=spectrum.total_dimension,
        support=ShellSupport(macrostate=a, delta=to_fraction(delta), scale=scale, convention=convention),
    )
