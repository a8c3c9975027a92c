from typing import Optional


class ShapingError(Exception):
    """Base class for every error raised by the shaping simulator."""
    pass


class DimensionError(ShapingError):
    """Raised when tensor shapes do not agree for an operation."""
    pass


class UnsupportedLengthError(ShapingError):
    """Raised when a transform length is not a power of two."""
    pass


class NonFiniteError(ShapingError):
    """Raised when an operation produces NaN or Inf values."""
    pass


class NonFiniteGradientError(ShapingError):
    """Raised by the optimizer when a gradient contains NaN or Inf."""

    def __init__(self, step: int, parameter: str):
        self.step = step
        self.parameter = parameter
        super().__init__(f"non-finite gradient at step {step} for parameter '{parameter}'")


class ConsistencyError(ShapingError):
    """Raised when an internal invariant of the OFDM chain is broken."""
    pass


class UndefinedPaprError(ShapingError):
    """Raised when PAPR is requested for an all-zero signal."""
    pass


class EmptySampleError(ShapingError):
    """Raised when a statistic is requested over an empty sample set."""
    pass


class DegenerateConstellationError(ShapingError):
    """Raised when a constellation has zero average energy."""
    pass


class CheckpointError(ShapingError):
    """Raised when a checkpoint file cannot be parsed."""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class TrainingDivergedError(ShapingError):
    """Raised when the training loss diverges or becomes non-finite."""

    def __init__(self, message: str, step: int, trace: Optional[list] = None):
        self.step = step
        self.trace = trace or []
        super().__init__(f"{message} (step {step})")


class ConfigError(ShapingError):
    """Raised when an experiment configuration is invalid."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"invalid config key '{key}': {message}")


class SystemKindError(ShapingError):
    """Raised when an unknown link system or metric is requested."""
    pass
