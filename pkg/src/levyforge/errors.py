"""Exception hierarchy shared across the package."""


class LevyForgeError(Exception):
    """Base class for all package errors."""


class DomainError(LevyForgeError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class ParseError(LevyForgeError, ValueError):
    """Malformed input data; message carries file/row context."""


class OrderingError(ParseError):
    """Input rows are not in the required chronological order."""


class DegenerateScaleError(DomainError):
    """A scaler cannot be fitted because the data has zero spread."""


class SizeError(DomainError):
    """An input is too short (or too long) for the requested operation."""


class ShapeError(DomainError):
    """Array shapes do not line up."""


class NumericalError(LevyForgeError):
    """A numerical routine failed to produce a reliable result."""


class TractabilityError(NumericalError):
    """Requested settings would make the computation intractable."""


class ContractError(LevyForgeError):
    """An API was called with state from a mismatched earlier call."""


class TrainingError(LevyForgeError):
    """Model training diverged or could not proceed."""


class CalibrationError(TrainingError):
    """Parameter calibration failed."""


class SearchError(LevyForgeError):
    """A metaheuristic search could not be started or completed."""


class UnsupportedParameterizationError(DomainError):
    """Parameter combination falls outside the supported branch."""
