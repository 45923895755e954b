"""Exception hierarchy shared by every NHC Lab module."""


class NhcLabError(Exception):
    """Base class for all errors raised deliberately by this package."""


class DimensionMismatchError(NhcLabError, ValueError):
    """Input width does not match the classifier or estimator width."""


class InvalidLabelError(NhcLabError, ValueError):
    """Class id outside [0, num_classes)."""


class CheckpointFormatError(NhcLabError, ValueError):
    """Checkpoint file is malformed or inconsistent."""


class TrainingDivergedError(NhcLabError, RuntimeError):
    """Training produced a non-finite loss."""


class PlacementError(NhcLabError, RuntimeError):
    """Out-of-domain sampler could not place the requested points."""


class ConfigError(NhcLabError, ValueError):
    """Experiment document failed validation."""

    def __init__(self, message: str, field_errors=None):
        super().__init__(message)
        self.field_errors = field_errors or []


class ExportError(NhcLabError, OSError):
    """Writing or reading a result file failed."""
