class AdiabaticError(Exception):
    """Base class for every error raised by the toolkit"""


class ValidationFailure(AdiabaticError, ValueError):
    """Input that cannot be accepted (CLI exit code 1)"""


class ComputationFailure(AdiabaticError, RuntimeError):
    """A well-formed request whose computation could not complete (CLI exit code 2)"""


class UnknownFamilyError(ValidationFailure):
    def __init__(self, family: str):
        super().__init__(f"unknown model family '{family}'")
        self.family = family


class EmptySiteTableError(ValidationFailure):
    def __init__(self):
        super().__init__("empty site table")


class ArityMismatchError(ValidationFailure):
    pass


class ScaleMismatchError(ValidationFailure):
    def __init__(self, expected: int, actual: int):
        super().__init__(f"scale mismatch: spectrum built at X={actual}, requested X={expected}")
        self.expected = expected
        self.actual = actual


class InsufficientPointsError(ValidationFailure):
    pass


class NotMajorizedError(ValidationFailure):
    """No unital witness exists because the majorization relation fails"""


class SpectrumCapExceeded(ComputationFailure):
    def __init__(self, predicted: int, cap: int, scale: int):
        super().__init__(
            f"predicted {predicted} distinct tuples at X={scale} exceeds the spectrum cap {cap}; "
            f"use spectra.stream_spectrum to count thresholds without materializing the table"
        )
        self.predicted = predicted
        self.cap = cap
        self.scale = scale


class EmptyShellError(ComputationFailure):
    def __init__(self, detail: str = ""):
        message = "empty shell"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class DegenerateWindowError(ComputationFailure):
    pass


class GapConditionError(ComputationFailure):
    def __init__(self, epsilon, largest_scale: int):
        super().__init__(
            f"gap condition never met for epsilon={epsilon} within tested scales (up to X={largest_scale})"
        )
        self.epsilon = epsilon
        self.largest_scale = largest_scale


class WitnessFailure(ComputationFailure):
    pass
